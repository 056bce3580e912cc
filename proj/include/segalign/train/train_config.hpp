// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

namespace segalign {

struct TrainConfig {
  std::size_t epochs = 6;
  std::size_t batch_size = 16;
  double lr_peak = 3e-4;
  double weight_decay = 1e-4;
  double grad_clip_norm = 2.0;
  std::size_t patience = 2;  // epochs without validation improvement
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  /// Additionally keep every mini-batch gradient (inspection only; memory heavy).
  bool keep_batch_gradients = false;

  /// Single-task defaults: clip 2.
  static TrainConfig single_task();
  /// Multi-task defaults: clip 5, peak rate scaled 3:2 against single-task.
  static TrainConfig multi_task();

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace segalign
