// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "segalign/model/encoder.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/train/loss.hpp"
#include "segalign/train/optimizer.hpp"
#include "segalign/train/split.hpp"
#include "segalign/train/train_config.hpp"
#include "segalign/train/trainer.hpp"

using namespace segalign;

namespace {

ModelConfig tiny_config() {
  ModelConfig c;
  c.vocab_size = 24;
  c.max_seq_len = 12;
  c.d_model = 16;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 32;
  c.dropout_p = 0.1;
  return c;
}

// Task 0 (3 classes) is the marker token; task 1 (2 classes) is whether a
// second marker shows up. Filler tokens are random.
LabeledDataset separable(std::size_t n, std::uint64_t seed) {
  LabeledDataset d;
  d.schema = MultiTaskSchema({{"a", 3}, {"b", 2}});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = static_cast<int>(i % 3);
    const int b = static_cast<int>((i / 3) % 2);
    std::vector<int> toks{special_tokens::kCls};
    const std::size_t len = 4 + rng.below(6);
    for (std::size_t t = 0; t < len; ++t) toks.push_back(10 + static_cast<int>(rng.below(14)));
    toks[1 + rng.below(len)] = 4 + a;
    if (b == 1) toks[1 + rng.below(len)] = 8;
    d.examples.push_back({toks, {a, b}, {}});
  }
  return d;
}

TrainConfig quick_train(std::size_t epochs) {
  TrainConfig t = TrainConfig::single_task();
  t.epochs = epochs;
  t.lr_peak = 3e-3;
  t.patience = epochs;
  t.seed = 11;
  return t;
}

}  // namespace

TEST_CASE("cross_entropy examples") {
  auto ce = cross_entropy(std::vector<double>{0.0, 0.0}, 0);
  CHECK(ce.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(ce.grad[0] == doctest::Approx(-0.5));
  CHECK(ce.grad[1] == doctest::Approx(0.5));

  CHECK(cross_entropy(std::vector<double>{10.0, -10.0}, 0).loss < 1e-8);

  const double expect = std::log(1.0 + std::exp(-1.0) + std::exp(-2.0));
  CHECK(cross_entropy(std::vector<double>{1.0, 2.0, 3.0}, 2).loss ==
        doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(0.4076).epsilon(1e-4));

  // Large logits stay finite.
  auto big = cross_entropy(std::vector<double>{1000.0, -1000.0}, 1);
  CHECK(std::isfinite(big.loss));
  CHECK(big.loss == doctest::Approx(2000.0));
}

TEST_CASE("multi_task_loss sums and assembles blocks") {
  const MultiTaskSchema schema = MultiTaskSchema::lumbar();
  std::vector<TaskLoss> parts;
  const double vals[] = {0.5, 0.25, 0.25};
  for (std::size_t t = 0; t < schema.size(); ++t) {
    Matrix g(2, schema[t].n_classes);
    g.fill(static_cast<double>(t + 1));
    parts.push_back({schema[t].name, vals[t], g});
  }
  std::swap(parts[0], parts[2]);  // order in the list should not matter
  MultiTaskLoss total = multi_task_loss(parts, schema);
  CHECK(total.total == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(total.logit_grad.cols() == 8);
  CHECK(total.logit_grad(0, 0) == 1.0);
  CHECK(total.logit_grad(1, 3) == 2.0);
  CHECK(total.logit_grad(1, 7) == 3.0);

  // A zeroed task leaves a zero block and the others intact.
  parts[1].logit_grad.fill(0.0);
  parts[1].loss = 0.0;
  MultiTaskLoss z = multi_task_loss(parts, schema);
  for (std::size_t c = 3; c < 6; ++c) CHECK(z.logit_grad(0, c) == 0.0);
  CHECK(z.logit_grad(0, 0) == 1.0);
  CHECK(z.logit_grad(0, 6) == 3.0);

  parts.pop_back();
  CHECK_THROWS_AS(multi_task_loss(parts, schema), InvalidInput);
}

TEST_CASE("summed-loss gradient equals sum of per-task backward passes") {
  ModelConfig c = tiny_config();
  c.schema = MultiTaskSchema::lumbar();
  ParameterStore p = init_model(c, Rng(5));
  LabeledDataset d = separable(6, 2);
  std::vector<std::vector<int>> rows;
  for (const auto& ex : d.examples) rows.push_back(ex.tokens);
  Batch batch = Batch::from_sequences(rows, c.max_seq_len);

  Rng rng(0);
  ForwardOutput out = forward(p, batch, false, rng);
  const std::vector<int> targets[] = {{0, 1, 2, 0, 1, 2}, {2, 2, 1, 0, 0, 1}, {0, 1, 0, 1, 1, 0}};
  std::vector<TaskLoss> losses;
  for (std::size_t t = 0; t < 3; ++t) {
    losses.push_back(batch_cross_entropy(c.schema[t].name, out.logits[t], targets[t]));
  }
  MultiTaskLoss total = multi_task_loss(losses, c.schema);
  ParameterStore joint = backward(p, out.cache, total.blocks);

  ParameterStore summed = zeros_like(p);
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<Matrix> blocks;
    for (std::size_t u = 0; u < 3; ++u) {
      blocks.push_back(u == t ? total.blocks[u] : Matrix(6, c.schema[u].n_classes));
    }
    axpy(summed, 1.0, backward(p, out.cache, blocks));
  }
  axpy(summed, -1.0, joint);
  CHECK(std::sqrt(squared_norm(summed)) <= 1e-10 * std::max(1.0, std::sqrt(squared_norm(joint))));
}

TEST_CASE("batch_cross_entropy ignores negative targets") {
  Matrix logits = Matrix::from_rows({{0.0, 0.0}, {5.0, 1.0}, {1.0, 2.0}});
  TaskLoss l = batch_cross_entropy("t", logits, std::vector<int>{0, -1, 1});
  const double expect = 0.5 * (std::log(2.0) + std::log(1.0 + std::exp(-1.0)));
  CHECK(l.loss == doctest::Approx(expect).epsilon(1e-14));
  CHECK(l.logit_grad(1, 0) == 0.0);
  CHECK(l.logit_grad(1, 1) == 0.0);
  CHECK(l.logit_grad(0, 0) == doctest::Approx(-0.25));
  CHECK_THROWS_AS(batch_cross_entropy("t", logits, std::vector<int>{0, 2, 1}), InvalidInput);
}

TEST_CASE("lr_at boundaries and monotonicity") {
  TrainConfig cfg;
  cfg.lr_peak = 1e-3;
  CHECK(lr_at(0, 100, cfg) == 1e-3);
  CHECK(lr_at(100, 100, cfg) == 0.0);
  CHECK(lr_at(50, 100, cfg) == doctest::Approx(5e-4).epsilon(1e-15));
  double prev = lr_at(0, 37, cfg);
  for (std::size_t s = 1; s <= 37; ++s) {
    const double cur = lr_at(s, 37, cfg);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("clip_gradients") {
  GradientSet g({ParamGroup{0, 0, GroupKind::Embedding, 2}, ParamGroup{1, 0, GroupKind::Attention, 1}},
                {{0.6, 0.0}, {0.8}});
  CHECK(global_norm(g) == doctest::Approx(1.0));
  CHECK(clip_gradients(g, 2.0) == g);

  GradientSet big = g;
  big *= 10.0;
  GradientSet clipped = clip_gradients(big, 2.0);
  CHECK(global_norm(clipped) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(clipped.vectors()[0][0] == doctest::Approx(1.2));

  GradientSet zero = g;
  zero *= 0.0;
  CHECK(clip_gradients(zero, 2.0) == zero);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    GradientSet r = g;
    r *= rng.uniform(0.0, 100.0);
    CHECK(global_norm(clip_gradients(r, 1.5)) <= 1.5 + 1e-9);
  }
}

TEST_CASE("AdamW examples") {
  std::vector<double> w{1.0, -2.0};
  std::vector<double> zero{0.0, 0.0};
  std::span<double> pw[] = {w};
  std::span<const double> pg[] = {zero};

  AdamW plain({0.9, 0.999, 1e-8, 0.0});
  plain.step(pw, pg, 0.1);
  CHECK(w == std::vector<double>{1.0, -2.0});

  AdamW decayed({0.9, 0.999, 1e-8, 0.01});
  decayed.step(pw, pg, 0.1);
  CHECK(w[0] == doctest::Approx(1.0 * (1.0 - 0.1 * 0.01)).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(-2.0 * (1.0 - 0.1 * 0.01)).epsilon(1e-15));

  std::vector<double> s{1.0};
  std::vector<double> g{1.0};
  std::span<double> ps[] = {s};
  std::span<const double> pgs[] = {g};
  AdamW one({0.9, 0.999, 1e-8, 0.0});
  one.step(ps, pgs, 0.1);
  // m̂ = 1, v̂ = 1 ⇒ w = 1 − 0.1·1/(1 + 1e-8)
  CHECK(s[0] == doctest::Approx(1.0 - 0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(one.steps() == 1);
}

TEST_CASE("stratified_split") {
  std::vector<int> strata(100, 0);
  for (std::size_t i = 80; i < 100; ++i) strata[i] = 1;
  SplitIndices s = stratified_split(strata, 0.2, 7);
  std::size_t c0 = 0, c1 = 0;
  for (std::size_t i : s.validation) (strata[i] == 0 ? c0 : c1)++;
  CHECK(c0 == 16);
  CHECK(c1 == 4);
  CHECK(s.train.size() == 80);

  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(100);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(all == expect);

  SplitIndices again = stratified_split(strata, 0.2, 7);
  CHECK(again.train == s.train);
  CHECK(again.validation == s.validation);
  CHECK(stratified_split(strata, 0.2, 8).validation != s.validation);

  CHECK(stratified_split(strata, 0.0, 7).validation.empty());

  strata.push_back(5);
  CHECK_THROWS_AS(stratified_split(strata, 0.2, 7), InvalidInput);
  CHECK_NOTHROW(stratified_split(strata, 0.0, 7));
}

TEST_CASE("train_single_task learns a separable task") {
  LabeledDataset d = separable(200, 1);
  TrainConfig cfg = quick_train(10);
  TrainResult r = train_single_task(d, "a", tiny_config(), cfg);
  REQUIRE(r.history.size() == 10);
  CHECK(r.snapshots.size() == r.history.size());
  CHECK(r.history[1].train_loss < r.history[0].train_loss);
  CHECK(r.history[2].train_loss < r.history[1].train_loss);
  CHECK(r.params.config.schema.widths() == std::vector<std::size_t>{3});
  CHECK(r.history[r.best_epoch - 1].val_mean_f1 > 0.8);

  for (const auto& snap : r.snapshots) {
    CHECK(snap.task == "a");
    CHECK(snap.gradients.groups() == param_groups(r.params.config));
  }
  for (const auto& m : r.history) CHECK(m.val_mean_f1 <= r.history[r.best_epoch - 1].val_mean_f1);

  TrainResult again = train_single_task(d, "a", tiny_config(), cfg);
  REQUIRE(again.history.size() == r.history.size());
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    CHECK(to_json_line(again.history[e]) == to_json_line(r.history[e]));
  }
  CHECK(again.params == r.params);

  CHECK_THROWS_AS(train_single_task(LabeledDataset{d.schema, {}}, "a", tiny_config(), cfg),
                  InvalidInput);
  CHECK_THROWS_AS(train_single_task(d, "missing", tiny_config(), cfg), InvalidInput);
}

TEST_CASE("train_multi_task heads, sharing and determinism") {
  LabeledDataset d = separable(60, 4);
  d.schema = MultiTaskSchema({{"stenosis", 3}, {"disc", 2}});
  TrainConfig cfg = TrainConfig::multi_task();
  cfg.epochs = 2;
  cfg.seed = 3;
  TrainResult r = train_multi_task(d, tiny_config(), cfg);
  CHECK(r.params.config.schema.widths() == std::vector<std::size_t>{3, 2});
  CHECK(r.params == train_multi_task(d, tiny_config(), cfg).params);

  ModelConfig lumbar = tiny_config();
  lumbar.schema = MultiTaskSchema::lumbar();
  CHECK(lumbar.schema.widths() == std::vector<std::size_t>{3, 3, 2});
  std::size_t singles = 0;
  for (const auto& t : lumbar.schema.tasks()) {
    ModelConfig s = lumbar;
    s.schema = MultiTaskSchema::single(t.name, t.n_classes);
    singles += parameter_count(s);
  }
  CHECK(parameter_count(lumbar) < singles);

  LabeledDataset broken = d;
  broken.examples[7].labels.pop_back();
  CHECK_THROWS_AS(train_multi_task(broken, tiny_config(), cfg), InvalidInput);
}

TEST_CASE("TrainConfig defaults and validation") {
  TrainConfig s = TrainConfig::single_task();
  TrainConfig m = TrainConfig::multi_task();
  CHECK(s.batch_size == 16);
  CHECK(s.weight_decay == 1e-4);
  CHECK(s.grad_clip_norm == 2.0);
  CHECK(m.grad_clip_norm == 5.0);
  CHECK(m.lr_peak / s.lr_peak == doctest::Approx(1.5));
  CHECK(s.val_fraction == 0.2);
  TrainConfig bad = s;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}
