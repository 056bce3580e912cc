// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "segalign/model/config.hpp"
#include "segalign/model/param_groups.hpp"
#include "segalign/model/parameters.hpp"
#include "segalign/train/train_config.hpp"

namespace segalign {

/// One training example. Sequence mode reads `labels` (one per schema task);
/// token mode reads `token_tags` (one per token, negative = ignored).
struct Example {
  std::vector<int> tokens;
  std::vector<int> labels;
  std::vector<int> token_tags;
};

struct LabeledDataset {
  MultiTaskSchema schema;  // tasks that `labels` refer to
  std::vector<Example> examples;
};

struct EpochGradientSnapshot {
  std::size_t epoch = 0;  // 1-based
  std::string task;       // task name, or "multi" / "location"
  GradientSet gradients;  // sum of raw (pre-clip) mini-batch gradients
  std::vector<GradientSet> batches;  // only with keep_batch_gradients
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::map<std::string, double> val_macro_f1;
  double val_mean_f1 = 0.0;
  double lr = 0.0;
};

nlohmann::json to_json_line(const EpochMetrics& m);

struct TrainResult {
  ParameterStore params;  // weights of the best validation epoch
  std::vector<EpochGradientSnapshot> snapshots;
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;
};

/// Called after each completed epoch, before early-stopping decisions.
using EpochObserver = std::function<void(const EpochMetrics&, const EpochGradientSnapshot&)>;

/// Trains a one-head model on `task`. The validation split is stratified on
/// the first schema task so every task of a dataset sees the same split.
TrainResult train_single_task(const LabeledDataset& data, std::string_view task,
                              ModelConfig model, const TrainConfig& cfg,
                              const EpochObserver& observer = {});

/// Shared backbone, one head per schema task, summed losses.
TrainResult train_multi_task(const LabeledDataset& data, ModelConfig model,
                             const TrainConfig& cfg, const EpochObserver& observer = {});

/// Location/Other token tagger.
TrainResult train_token_tagger(const LabeledDataset& data, ModelConfig model,
                               const TrainConfig& cfg, const EpochObserver& observer = {});

/// Per-task macro F1 of `params` on `examples` (token mode: one entry,
/// "location", scored over non-ignored tokens).
std::map<std::string, double> evaluate_macro_f1(const ParameterStore& params,
                                                const std::vector<Example>& examples,
                                                std::size_t batch_size = 64);

/// Token-level F1 of the Location class.
double evaluate_location_f1(const ParameterStore& params, const std::vector<Example>& examples,
                            std::size_t batch_size = 64);

}  // namespace segalign
