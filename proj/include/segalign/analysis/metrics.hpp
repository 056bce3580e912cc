// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace segalign {

struct ClassF1 {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  double f1 = 0.0;
  /// Class never occurs in gold or predictions; contributes 0 to the mean.
  bool absent = false;
};

struct MacroF1 {
  double value = 0.0;
  std::vector<ClassF1> per_class;
};

/// Unweighted mean of per-class F1. Classes absent from both inputs score 0
/// and are reported through `absent` (and a one-line warning on stderr when
/// `warn` is set).
MacroF1 macro_f1_detail(std::span<const std::size_t> predictions,
                        std::span<const std::size_t> golds, std::size_t n_classes,
                        bool warn = false);

double macro_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> golds,
                std::size_t n_classes);

/// F1 of a single positive class (token tagging quality).
double class_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> golds,
                std::size_t positive_class);

}  // namespace segalign
