// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "segalign/analysis/alignment.hpp"
#include "segalign/analysis/box_stats.hpp"
#include "segalign/analysis/cka.hpp"
#include "segalign/analysis/export.hpp"
#include "segalign/analysis/metrics.hpp"
#include "segalign/numerics/errors.hpp"

using namespace segalign;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.vocab_size = 12;
  c.max_seq_len = 4;
  c.d_model = 4;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 6;
  c.schema = MultiTaskSchema::single("disc", 3);
  return c;
}

GradientSet random_set(const ModelConfig& c, Rng& rng) {
  GradientSet s = GradientSet::zeros(c);
  for (auto& v : s.vectors())
    for (double& x : v) x = rng.normal();
  return s;
}

}  // namespace

TEST_CASE("linear CKA examples and invariances") {
  Rng rng(1);
  Matrix r = random_matrix(40, 6, rng);
  CHECK(std::abs(linear_cka(r, r) - 1.0) <= 1e-9);

  Matrix q = oracle::random_orthogonal(6, rng);
  CHECK(std::abs(linear_cka(r, matmul(r, q)) - 1.0) <= 1e-9);
  CHECK(std::abs(linear_cka(r, r * -3.5) - 1.0) <= 1e-9);

  Matrix a = Matrix::from_rows({{0}, {1}, {2}});
  Matrix b = Matrix::from_rows({{1}, {0}, {1}});
  CHECK(std::abs(linear_cka(a, b)) <= 1e-12);

  CHECK_THROWS_AS(linear_cka(Matrix(5, 2, 3.0), random_matrix(5, 2, rng)), UndefinedSimilarity);
  CHECK_THROWS_AS(linear_cka(Matrix(1, 2), Matrix(1, 2)), InvalidInput);
  CHECK_THROWS_AS(linear_cka(Matrix(3, 2), Matrix(4, 2)), InvalidInput);
}

TEST_CASE("linear CKA agrees with the centred-Gram route and is symmetric") {
  Rng rng(2);
  for (int t = 0; t < 25; ++t) {
    const auto n = 3 + rng.below(30);
    Matrix x = random_matrix(n, 1 + rng.below(8), rng);
    Matrix y = random_matrix(n, 1 + rng.below(8), rng);
    // Partially correlated views.
    if (t % 2 == 0 && x.cols() == y.cols()) y += x * 2.0;
    const double v = linear_cka(x, y);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::abs(v - oracle::cka_via_gram(x, y)) < 1e-10);
    CHECK(std::abs(v - linear_cka(y, x)) <= 1e-12);
  }
}

TEST_CASE("unsquared numerator is only a comparison variant") {
  Rng rng(4);
  Matrix r = random_matrix(10, 3, rng) * 5.0;
  CHECK(std::abs(linear_cka(r, r, CkaNumerator::Unsquared) - 1.0) > 1e-3);
}

TEST_CASE("layerwise CKA shape and self case") {
  ActivationStack s;
  Rng rng(5);
  for (int l = 0; l < 4; ++l) {
    s.layers.push_back({{"post_attention", random_matrix(12, 4, rng)},
                        {"post_ffn", random_matrix(12, 4, rng)},
                        {"layer_output", random_matrix(12, 4, rng)}});
  }
  s.pooled = random_matrix(12, 4, rng);
  CkaReport self = layerwise_cka(s, s);
  REQUIRE(self.layers.size() == 4);
  for (const auto& layer : self.layers) {
    CHECK(layer.values.size() == 3);
    for (double v : layer.values) CHECK(std::abs(v - 1.0) < 1e-9);
  }
  ActivationStack other = s;
  other.pooled = random_matrix(10, 4, rng);
  CHECK_THROWS_AS(layerwise_cka(s, other), InvalidInput);
  CHECK(cka_csv(self).substr(0, 55) == "layer,min,q1,median,q3,max,post_attention,post_ffn,laye");
}

TEST_CASE("grad_dot and alignment_flag") {
  CHECK(grad_dot(std::vector<double>{1, 2}, std::vector<double>{3, -1}) == 1.0);
  std::vector<double> g{0.5, -2, 3}, neg{-0.5, 2, -3};
  CHECK(grad_dot(g, g) > 0.0);
  CHECK(grad_dot(g, neg) == -grad_dot(g, g));
  CHECK_THROWS_AS(grad_dot(g, std::vector<double>{1}), InvalidInput);
  CHECK(alignment_flag(0.3) == 1);
  CHECK(alignment_flag(-0.3) == 0);
  CHECK(alignment_flag(0.0) == 0);
}

TEST_CASE("APAG enumerated case") {
  // Five single-value groups with dots (+, -, +, +, 0).
  std::vector<ParamGroup> groups;
  for (std::size_t i = 0; i < 5; ++i) groups.push_back({i, 1, GroupKind::FeedForward, 1});
  GradientSet a(groups, {{1}, {1}, {1}, {1}, {1}});
  GradientSet b(groups, {{2}, {-1}, {0.5}, {3}, {0}});
  CHECK(apag(a, b) == doctest::Approx(0.6));
}

TEST_CASE("APAG and layer proportions match the brute-force oracle") {
  ModelConfig c = tiny_config();
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    GradientSet a = random_set(c, rng), b = random_set(c, rng);
    auto brute = oracle::brute_alignment(a, b);
    CHECK(apag(a, b) == brute.apag);
    for (const auto& lp : layer_alignment_proportions(a, b)) {
      CHECK(lp.proportion == brute.layer_proportion.at(lp.layer));
    }
    CHECK(apag(a, b) == apag(b, a));
  }
  GradientSet a = random_set(c, rng);
  GradientSet neg = a;
  neg *= -1.0;
  CHECK(apag(a, a) == 1.0);
  CHECK(apag(a, neg) == 0.0);
  auto props = layer_alignment_proportions(a, a);
  CHECK(props.size() == c.n_layers + 2);
  for (const auto& lp : props) CHECK(lp.proportion == 1.0);
}

TEST_CASE("layer with heads dotting (+,+,-,-) has proportion one half") {
  std::vector<ParamGroup> groups;
  for (std::size_t h = 1; h <= 4; ++h) groups.push_back({1, h, GroupKind::Attention, 2});
  GradientSet a(groups, {{1, 0}, {1, 0}, {1, 0}, {1, 0}});
  GradientSet b(groups, {{1, 1}, {2, 0}, {-1, 5}, {-3, 0}});
  auto props = layer_alignment_proportions(a, b);
  REQUIRE(props.size() == 1);
  CHECK(props[0].proportion == 0.5);
}

TEST_CASE("classifier heads of different widths compare over shared classes") {
  ModelConfig c3 = tiny_config();
  ModelConfig c2 = c3;
  c2.schema = MultiTaskSchema::single("nerve", 2);
  Rng rng(7);
  GradientSet a = random_set(c3, rng);
  GradientSet b = random_set(c2, rng);
  auto cmp = compare_gradients(a, b);
  CHECK(cmp.back().compared_length == 2 * (c3.d_model + 1));
  auto brute = oracle::brute_alignment(a, b);
  CHECK(apag(a, b) == brute.apag);

  ModelConfig deeper = c3;
  deeper.n_layers = 3;
  CHECK_THROWS_AS(apag(a, random_set(deeper, rng)), InvalidInput);
}

TEST_CASE("grad cosine") {
  ModelConfig c = tiny_config();
  Rng rng(8);
  GradientSet a = random_set(c, rng);
  CHECK(grad_cosine(a, a).scalar == doctest::Approx(1.0));
  GradientSet b = GradientSet::zeros(c);
  // Orthogonal per group: each group of a is (x, y, ...) and b is built
  // orthogonal by the 2-element rotation on the first two entries.
  GradientSet ao = GradientSet::zeros(c);
  for (std::size_t g = 0; g < a.size(); ++g) {
    ao.vectors()[g][0] = 1.0;
    b.vectors()[g][1] = 1.0;
  }
  CHECK(grad_cosine(ao, b).scalar == 0.0);
  for (const auto& g : compare_gradients(a, random_set(c, rng))) {
    CHECK(g.cosine >= -1.0);
    CHECK(g.cosine <= 1.0);
  }
}

TEST_CASE("macro F1 examples") {
  using V = std::vector<std::size_t>;
  CHECK(macro_f1(V{0, 1, 2, 1}, V{0, 1, 2, 1}, 3) == 1.0);
  CHECK(std::abs(macro_f1(V{0, 1, 1, 1}, V{0, 0, 1, 1}, 2) - (2.0 / 3.0 + 4.0 / 5.0) / 2.0) < 1e-15);
  CHECK(std::abs(macro_f1(V{0, 0, 0, 0}, V{0, 0, 1, 1}, 2) - 1.0 / 3.0) < 1e-15);
  CHECK_THROWS_AS(macro_f1(V{}, V{}, 2), InvalidInput);
  CHECK_THROWS_AS(macro_f1(V{0}, V{0, 1}, 2), InvalidInput);

  auto detail = macro_f1_detail(V{0, 1}, V{0, 1}, 3);
  CHECK(detail.per_class[2].absent);
  CHECK(detail.value == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("macro F1 matches the confusion-matrix oracle and label permutations") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + rng.below(3);
    const std::size_t n = 1 + rng.below(40);
    std::vector<std::size_t> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.below(k);
      g[i] = rng.below(k);
    }
    const double v = macro_f1(p, g, k);
    CHECK(v == doctest::Approx(oracle::macro_f1_confusion(p, g, k)).epsilon(1e-14));
    std::vector<std::size_t> perm(k);
    for (std::size_t c = 0; c < k; ++c) perm[c] = c;
    rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = perm[p[i]];
      g[i] = perm[g[i]];
    }
    CHECK(macro_f1(p, g, k) == doctest::Approx(v).epsilon(1e-14));
  }
}

TEST_CASE("box stats interpolate quartiles") {
  std::vector<double> v{4, 1, 3, 2, 5};
  BoxStats s = box_stats(v);
  CHECK(s.min == 1);
  CHECK(s.q1 == 2);
  CHECK(s.median == 3);
  CHECK(s.q3 == 4);
  CHECK(s.max == 5);
  std::vector<double> even{1, 2, 3, 4};
  CHECK(box_stats(even).median == 2.5);
  CHECK(box_stats(even).q1 == 1.75);
}
