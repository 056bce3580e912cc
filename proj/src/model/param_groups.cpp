// SPDX-License-Identifier: Apache-2.0
#include "segalign/model/param_groups.hpp"

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

// A rectangular block of one tensor, flattened row-major.
struct Slice {
  std::size_t r0, r1, c0, c1;
};

Slice whole(const Matrix& m) { return {0, m.rows(), 0, m.cols()}; }

// Calls fn(group_index, matrix, slice) for every slice in canonical order.
template <typename Store, typename Fn>
void walk_groups(Store& s, Fn&& fn) {
  const auto& cfg = s.config;
  const std::size_t dk = cfg.head_dim();
  std::size_t g = 0;
  fn(g, s.token_embedding, whole(s.token_embedding));
  fn(g, s.position_embedding, whole(s.position_embedding));
  ++g;
  for (auto& L : s.layers) {
    for (std::size_t h = 0; h < cfg.n_heads; ++h) {
      const std::size_t c0 = h * dk, c1 = (h + 1) * dk;
      fn(g, L.wq, Slice{0, L.wq.rows(), c0, c1});
      fn(g, L.wk, Slice{0, L.wk.rows(), c0, c1});
      fn(g, L.wv, Slice{0, L.wv.rows(), c0, c1});
      fn(g, L.wo, Slice{c0, c1, 0, L.wo.cols()});
      ++g;
    }
    fn(g, L.ln1_gain, whole(L.ln1_gain));
    fn(g, L.ln1_bias, whole(L.ln1_bias));
    fn(g, L.ff1_w, whole(L.ff1_w));
    fn(g, L.ff1_b, whole(L.ff1_b));
    fn(g, L.ff2_w, whole(L.ff2_w));
    fn(g, L.ff2_b, whole(L.ff2_b));
    fn(g, L.ln2_gain, whole(L.ln2_gain));
    fn(g, L.ln2_bias, whole(L.ln2_bias));
    ++g;
  }
  for (auto& head : s.heads) {
    for (std::size_t c = 0; c < head.weight.rows(); ++c) {
      fn(g, head.weight, Slice{c, c + 1, 0, head.weight.cols()});
      fn(g, head.bias, Slice{0, 1, c, c + 1});
    }
  }
}

}  // namespace

std::string_view to_string(GroupKind k) noexcept {
  switch (k) {
    case GroupKind::Embedding: return "embedding";
    case GroupKind::Attention: return "attention";
    case GroupKind::FeedForward: return "feedforward";
    case GroupKind::Classifier: return "classifier";
  }
  return "?";
}

GroupKind group_kind_from_string(std::string_view s) {
  if (s == "embedding") return GroupKind::Embedding;
  if (s == "attention") return GroupKind::Attention;
  if (s == "feedforward") return GroupKind::FeedForward;
  if (s == "classifier") return GroupKind::Classifier;
  throw InvalidInput("unknown group kind '" + std::string(s) + "'");
}

std::string ParamGroup::label() const {
  return "L" + std::to_string(layer) + "/" + std::string(to_string(kind)) + "/H" +
         std::to_string(head);
}

std::vector<ParamGroup> param_groups(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.d_model;
  const std::size_t dk = config.head_dim();
  std::vector<ParamGroup> groups;
  groups.push_back({0, 1, GroupKind::Embedding, (config.vocab_size + config.max_seq_len) * d});
  for (std::size_t l = 1; l <= config.n_layers; ++l) {
    for (std::size_t h = 1; h <= config.n_heads; ++h) {
      groups.push_back({l, h, GroupKind::Attention, 4 * d * dk});
    }
    groups.push_back({l, 1, GroupKind::FeedForward, 2 * d * config.d_ff + config.d_ff + 5 * d});
  }
  std::size_t cls = 0;
  for (const auto& t : config.effective_schema().tasks()) cls += t.n_classes * (d + 1);
  groups.push_back({config.n_layers + 1, 1, GroupKind::Classifier, cls});
  return groups;
}

GradientSet::GradientSet(std::vector<ParamGroup> groups, std::vector<std::vector<double>> vectors)
    : groups_(std::move(groups)), vectors_(std::move(vectors)) {
  if (groups_.size() != vectors_.size()) {
    throw InvalidInput("GradientSet: group/vector count mismatch");
  }
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].size != vectors_[i].size()) {
      throw InvalidInput("GradientSet: group " + groups_[i].label() + " expects " +
                         std::to_string(groups_[i].size) + " values, got " +
                         std::to_string(vectors_[i].size()));
    }
  }
}

GradientSet GradientSet::zeros(const ModelConfig& config) {
  auto groups = param_groups(config);
  std::vector<std::vector<double>> vecs;
  for (const auto& g : groups) vecs.emplace_back(g.size, 0.0);
  return GradientSet(std::move(groups), std::move(vecs));
}

std::size_t GradientSet::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& v : vectors_) n += v.size();
  return n;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (groups_ != other.groups_) throw InvalidInput("GradientSet +=: group layout mismatch");
  for (std::size_t g = 0; g < vectors_.size(); ++g) {
    for (std::size_t i = 0; i < vectors_[g].size(); ++i) vectors_[g][i] += other.vectors_[g][i];
  }
  return *this;
}

GradientSet& GradientSet::operator*=(double s) noexcept {
  for (auto& v : vectors_)
    for (double& x : v) x *= s;
  return *this;
}

GradientSet group_gradients(const ParameterStore& grads) {
  auto groups = param_groups(grads.config);
  std::vector<std::vector<double>> vecs(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) vecs[g].reserve(groups[g].size);
  walk_groups(grads, [&](std::size_t g, const Matrix& m, Slice s) {
    for (std::size_t r = s.r0; r < s.r1; ++r)
      for (std::size_t c = s.c0; c < s.c1; ++c) vecs[g].push_back(m(r, c));
  });
  return GradientSet(std::move(groups), std::move(vecs));
}

void scatter_groups(const GradientSet& set, ParameterStore& out) {
  if (set.groups() != param_groups(out.config)) {
    throw InvalidInput("scatter_groups: layout does not match the target store");
  }
  std::vector<std::size_t> cursor(set.size(), 0);
  walk_groups(out, [&](std::size_t g, Matrix& m, Slice s) {
    const auto& v = set.vectors()[g];
    for (std::size_t r = s.r0; r < s.r1; ++r)
      for (std::size_t c = s.c0; c < s.c1; ++c) m(r, c) = v[cursor[g]++];
  });
}

}  // namespace segalign
