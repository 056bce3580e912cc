// SPDX-License-Identifier: Apache-2.0
#include "segalign/analysis/metrics.hpp"

#include <iostream>
#include <string>

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

void validate(std::span<const std::size_t> pred, std::span<const std::size_t> gold,
              std::size_t n_classes) {
  if (pred.empty()) throw InvalidInput("macro_f1: empty input");
  if (pred.size() != gold.size()) {
    throw InvalidInput("macro_f1: " + std::to_string(pred.size()) + " predictions vs " +
                       std::to_string(gold.size()) + " golds");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] >= n_classes || gold[i] >= n_classes) {
      throw InvalidInput("macro_f1: label outside [0, " + std::to_string(n_classes) + ")");
    }
  }
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

MacroF1 macro_f1_detail(std::span<const std::size_t> predictions,
                        std::span<const std::size_t> golds, std::size_t n_classes, bool warn) {
  validate(predictions, golds, n_classes);
  MacroF1 out;
  out.per_class.resize(n_classes);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const std::size_t p = predictions[i], g = golds[i];
    if (p == g) {
      ++out.per_class[p].true_positive;
    } else {
      ++out.per_class[p].false_positive;
      ++out.per_class[g].false_negative;
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    ClassF1& cf = out.per_class[c];
    cf.absent = cf.true_positive + cf.false_positive + cf.false_negative == 0;
    cf.f1 = f1_from_counts(cf.true_positive, cf.false_positive, cf.false_negative);
    if (cf.absent && warn) {
      std::cerr << "warning: class " << c << " absent from gold and predictions; F1 counted as 0\n";
    }
    sum += cf.f1;
  }
  out.value = sum / static_cast<double>(n_classes);
  return out;
}

double macro_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> golds,
                std::size_t n_classes) {
  return macro_f1_detail(predictions, golds, n_classes).value;
}

double class_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> golds,
                std::size_t positive_class) {
  if (predictions.size() != golds.size()) throw InvalidInput("class_f1: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] == positive_class, g = golds[i] == positive_class;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  return f1_from_counts(tp, fp, fn);
}

}  // namespace segalign
