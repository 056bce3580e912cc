// SPDX-License-Identifier: Apache-2.0
#include "segalign/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "segalign/analysis/metrics.hpp"
#include "segalign/model/encoder.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/train/loss.hpp"
#include "segalign/train/optimizer.hpp"
#include "segalign/train/split.hpp"

namespace segalign {

namespace {

constexpr int kLocationTag = 1;

struct PreparedBatch {
  Batch batch;
  std::vector<std::vector<int>> targets;  // per task, one per logits row
};

PreparedBatch prepare(const std::vector<Example>& examples, std::span<const std::size_t> idx,
                      const ModelConfig& model) {
  std::vector<std::vector<int>> rows;
  rows.reserve(idx.size());
  for (std::size_t i : idx) rows.push_back(examples[i].tokens);
  PreparedBatch pb;
  pb.batch = Batch::from_sequences(rows, model.max_seq_len);
  const std::size_t T = pb.batch.seq_len;

  if (model.head_mode == HeadMode::TokenClassifier) {
    std::vector<int> tags(idx.size() * T, -1);
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const auto& ex = examples[idx[b]];
      const std::size_t n = std::min(ex.token_tags.size(), T);
      for (std::size_t t = 0; t < n; ++t) {
        if (pb.batch.mask[b * T + t]) tags[b * T + t] = ex.token_tags[t];
      }
    }
    pb.targets.push_back(std::move(tags));
  } else {
    const std::size_t n_tasks = model.schema.size();
    pb.targets.assign(n_tasks, std::vector<int>(idx.size(), -1));
    for (std::size_t b = 0; b < idx.size(); ++b) {
      for (std::size_t t = 0; t < n_tasks; ++t) pb.targets[t][b] = examples[idx[b]].labels[t];
    }
  }
  return pb;
}

void check_examples(const std::vector<Example>& examples, const ModelConfig& model) {
  if (examples.empty()) throw InvalidInput("training set is empty");
  const MultiTaskSchema schema = model.effective_schema();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (ex.tokens.empty()) throw InvalidInput("example " + std::to_string(i) + " has no tokens");
    if (model.head_mode == HeadMode::TokenClassifier) {
      if (ex.token_tags.size() != ex.tokens.size()) {
        throw InvalidInput("example " + std::to_string(i) + ": token_tags length mismatch");
      }
      continue;
    }
    if (ex.labels.size() != schema.size()) {
      throw InvalidInput("example " + std::to_string(i) + " is missing task labels");
    }
    for (std::size_t t = 0; t < schema.size(); ++t) {
      if (ex.labels[t] < 0 || static_cast<std::size_t>(ex.labels[t]) >= schema[t].n_classes) {
        throw InvalidInput("example " + std::to_string(i) + " has no valid label for task '" +
                           schema[t].name + "'");
      }
    }
  }
}

struct Predictions {
  // Per task: flattened predictions and golds over scored positions.
  std::vector<std::vector<std::size_t>> pred, gold;
};

Predictions collect_predictions(const ParameterStore& params, const std::vector<Example>& examples,
                                std::size_t batch_size) {
  const ModelConfig& model = params.config;
  const MultiTaskSchema schema = model.effective_schema();
  Predictions out;
  out.pred.resize(schema.size());
  out.gold.resize(schema.size());
  std::vector<std::size_t> idx(examples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, idx.size() - start);
    std::span<const std::size_t> chunk(idx.data() + start, n);
    PreparedBatch pb = prepare(examples, chunk, model);
    auto classes = predict(params, pb.batch);
    for (std::size_t t = 0; t < schema.size(); ++t) {
      for (std::size_t r = 0; r < pb.targets[t].size(); ++r) {
        if (pb.targets[t][r] < 0) continue;
        out.pred[t].push_back(classes[t][r]);
        out.gold[t].push_back(static_cast<std::size_t>(pb.targets[t][r]));
      }
    }
  }
  return out;
}

TrainResult run_training(const std::vector<Example>& examples, const ModelConfig& model,
                         const TrainConfig& cfg, const std::vector<int>& strata,
                         const std::string& snapshot_task, const EpochObserver& observer) {
  model.validate();
  cfg.validate();
  check_examples(examples, model);

  const Rng root(cfg.seed);
  const SplitIndices split =
      stratified_split(strata, cfg.val_fraction, root.split("validation").next_u64());
  if (split.train.empty()) throw InvalidInput("training split is empty");
  std::vector<Example> val_set;
  for (std::size_t i : split.validation) val_set.push_back(examples[i]);

  TrainResult result;
  ParameterStore params = init_model(model, root.split("init"));
  AdamW optimizer({0.9, 0.999, 1e-8, cfg.weight_decay});
  const MultiTaskSchema schema = model.effective_schema();

  const std::size_t steps_per_epoch = (split.train.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = steps_per_epoch * cfg.epochs;
  Rng dropout_rng = root.split("dropout");
  const Rng shuffle_root = root.split("shuffle");

  double best_metric = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::size_t step = 0;
  result.params = params;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order = split.train;
    Rng shuffle = shuffle_root.split(epoch);
    shuffle.shuffle(std::span<std::size_t>(order));

    EpochGradientSnapshot snapshot;
    snapshot.epoch = epoch;
    snapshot.task = snapshot_task;
    snapshot.gradients = GradientSet::zeros(model);
    double loss_sum = 0.0;
    double lr = 0.0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      PreparedBatch pb = prepare(examples, std::span(order.data() + start, n), model);
      ForwardOutput out = forward(params, pb.batch, /*train_mode=*/true, dropout_rng);

      std::vector<TaskLoss> losses;
      for (std::size_t t = 0; t < schema.size(); ++t) {
        losses.push_back(batch_cross_entropy(schema[t].name, out.logits[t], pb.targets[t]));
      }
      MultiTaskLoss total = multi_task_loss(losses, schema);
      if (!std::isfinite(total.total)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch));
      }
      loss_sum += total.total;

      ParameterStore grads = backward(params, out.cache, total.blocks);
      GradientSet grouped = group_gradients(grads);
      snapshot.gradients += grouped;
      if (cfg.keep_batch_gradients) snapshot.batches.push_back(std::move(grouped));

      clip_gradients_inplace(grads, cfg.grad_clip_norm);
      lr = lr_at(step, total_steps, cfg);
      optimizer.step(params, grads, lr);
      ++step;
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = loss_sum / static_cast<double>(steps_per_epoch);
    metrics.lr = lr;
    if (!val_set.empty()) {
      metrics.val_macro_f1 = evaluate_macro_f1(params, val_set);
      double sum = 0.0;
      for (const auto& [name, f1] : metrics.val_macro_f1) sum += f1;
      metrics.val_mean_f1 = sum / static_cast<double>(metrics.val_macro_f1.size());
    }
    result.history.push_back(metrics);
    if (observer) observer(metrics, snapshot);
    result.snapshots.push_back(std::move(snapshot));

    // Without a validation split the last epoch is the best one.
    const double metric = val_set.empty() ? static_cast<double>(epoch) : metrics.val_mean_f1;
    if (metric > best_metric) {
      best_metric = metric;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience && cfg.patience > 0) {
      break;
    }
  }
  return result;
}

}  // namespace

nlohmann::json to_json_line(const EpochMetrics& m) {
  return {{"epoch", m.epoch},
          {"train_loss", m.train_loss},
          {"val_macro_f1", m.val_macro_f1},
          {"val_mean_f1", m.val_mean_f1},
          {"lr", m.lr}};
}

TrainResult train_single_task(const LabeledDataset& data, std::string_view task,
                              ModelConfig model, const TrainConfig& cfg,
                              const EpochObserver& observer) {
  if (data.examples.empty()) throw InvalidInput("train_single_task: empty dataset");
  model.head_mode = HeadMode::SequenceClassifier;
  model.schema = data.schema.subset(task);
  const std::size_t t = *data.schema.find(task);
  std::vector<Example> projected;
  std::vector<int> strata;
  projected.reserve(data.examples.size());
  for (const auto& ex : data.examples) {
    if (ex.labels.size() != data.schema.size()) {
      throw InvalidInput("train_single_task: example missing task labels");
    }
    projected.push_back({ex.tokens, {ex.labels[t]}, {}});
    // Shared strata keep every task's split and batch stream identical.
    strata.push_back(ex.labels[0]);
  }
  return run_training(projected, model, cfg, strata, std::string(task), observer);
}

TrainResult train_multi_task(const LabeledDataset& data, ModelConfig model,
                             const TrainConfig& cfg, const EpochObserver& observer) {
  if (data.examples.empty()) throw InvalidInput("train_multi_task: empty dataset");
  model.head_mode = HeadMode::SequenceClassifier;
  model.schema = data.schema;
  std::vector<int> strata;
  for (const auto& ex : data.examples) strata.push_back(ex.labels.empty() ? -1 : ex.labels[0]);
  return run_training(data.examples, model, cfg, strata, "multi", observer);
}

TrainResult train_token_tagger(const LabeledDataset& data, ModelConfig model,
                               const TrainConfig& cfg, const EpochObserver& observer) {
  if (data.examples.empty()) throw InvalidInput("train_token_tagger: empty dataset");
  model.head_mode = HeadMode::TokenClassifier;
  std::vector<int> strata;
  for (const auto& ex : data.examples) {
    strata.push_back(std::find(ex.token_tags.begin(), ex.token_tags.end(), kLocationTag) !=
                     ex.token_tags.end());
  }
  return run_training(data.examples, model, cfg, strata, "location", observer);
}

std::map<std::string, double> evaluate_macro_f1(const ParameterStore& params,
                                                const std::vector<Example>& examples,
                                                std::size_t batch_size) {
  const MultiTaskSchema schema = params.config.effective_schema();
  Predictions p = collect_predictions(params, examples, batch_size);
  std::map<std::string, double> out;
  for (std::size_t t = 0; t < schema.size(); ++t) {
    out[schema[t].name] =
        p.pred[t].empty() ? 0.0 : macro_f1(p.pred[t], p.gold[t], schema[t].n_classes);
  }
  return out;
}

double evaluate_location_f1(const ParameterStore& params, const std::vector<Example>& examples,
                            std::size_t batch_size) {
  if (params.config.head_mode != HeadMode::TokenClassifier) {
    throw InvalidInput("evaluate_location_f1 needs a token classifier");
  }
  Predictions p = collect_predictions(params, examples, batch_size);
  return class_f1(p.pred[0], p.gold[0], kLocationTag);
}

}  // namespace segalign
