// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "segalign/model/param_groups.hpp"
#include "segalign/model/parameters.hpp"

namespace segalign {

struct TrainConfig;

/// Linear decay from lr_peak at step 0 to 0 at total_steps.
double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg);

/// Global L2 norm over every group.
double global_norm(const GradientSet& g);
double global_norm(const ParameterStore& g);

/// Rescales all groups by max_norm / norm when the global norm exceeds
/// max_norm; identity otherwise.
GradientSet clip_gradients(GradientSet g, double max_norm);
/// In-place variant on store-shaped gradients. Returns the pre-clip norm.
double clip_gradients_inplace(ParameterStore& g, double max_norm);

struct AdamWSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// AdamW with decoupled weight decay:
///   w ← w·(1 − lr·wd);  w ← w − lr·m̂/(√v̂ + ε)
class AdamW {
 public:
  explicit AdamW(AdamWSettings settings) : settings_(settings) {}

  /// One update over parallel lists of parameter and gradient buffers.
  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads, double lr);
  void step(ParameterStore& params, const ParameterStore& grads, double lr);

  std::size_t steps() const noexcept { return t_; }

 private:
  AdamWSettings settings_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace segalign
