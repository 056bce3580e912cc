// SPDX-License-Identifier: Apache-2.0
#include "segalign/train/train_config.hpp"

#include <nlohmann/json.hpp>

#include "segalign/numerics/errors.hpp"

namespace segalign {

TrainConfig TrainConfig::single_task() { return TrainConfig{}; }

TrainConfig TrainConfig::multi_task() {
  TrainConfig c;
  c.epochs = 11;
  c.lr_peak = 4.5e-4;
  c.grad_clip_norm = 5.0;
  return c;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidInput("train config: " + m); };
  if (epochs == 0) fail("epochs must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(lr_peak > 0.0)) fail("lr_peak must be positive");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (!(grad_clip_norm > 0.0)) fail("grad_clip_norm must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) fail("val_fraction must be in [0,1)");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"lr_peak", c.lr_peak},
       {"weight_decay", c.weight_decay},
       {"grad_clip_norm", c.grad_clip_norm},
       {"scheduler", "linear"},
       {"patience", c.patience},
       {"val_fraction", c.val_fraction},
       {"seed", c.seed},
       {"keep_batch_gradients", c.keep_batch_gradients}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.lr_peak = j.at("lr_peak").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.grad_clip_norm = j.at("grad_clip_norm").get<double>();
  c.patience = j.at("patience").get<std::size_t>();
  c.val_fraction = j.at("val_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.keep_batch_gradients = j.value("keep_batch_gradients", false);
}

}  // namespace segalign
