// SPDX-License-Identifier: Apache-2.0
#include "segalign/analysis/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "segalign/numerics/errors.hpp"

namespace segalign {

double grad_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInput("grad_dot: lengths differ (" + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<GroupComparison> compare_gradients(const GradientSet& a, const GradientSet& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("gradient snapshots have " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()) + " groups");
  }
  std::vector<GroupComparison> out;
  out.reserve(a.size());
  for (std::size_t g = 0; g < a.size(); ++g) {
    const ParamGroup& ga = a.groups()[g];
    const ParamGroup& gb = b.groups()[g];
    if (ga.key() != gb.key()) {
      throw InvalidInput("gradient snapshot keys differ: " + ga.label() + " vs " + gb.label());
    }
    std::size_t n = ga.size;
    if (ga.size != gb.size) {
      if (ga.kind != GroupKind::Classifier) {
        throw InvalidInput("group " + ga.label() + " sizes differ: " + std::to_string(ga.size) +
                           " vs " + std::to_string(gb.size));
      }
      n = std::min(ga.size, gb.size);
    }
    std::span<const double> va(a.vectors()[g].data(), n);
    std::span<const double> vb(b.vectors()[g].data(), n);
    GroupComparison c;
    c.group = ga;
    c.compared_length = n;
    c.dot = grad_dot(va, vb);
    const double na = std::sqrt(grad_dot(va, va));
    const double nb = std::sqrt(grad_dot(vb, vb));
    c.cosine = (na == 0.0 || nb == 0.0) ? 0.0 : std::clamp(c.dot / (na * nb), -1.0, 1.0);
    c.aligned = alignment_flag(c.dot);
    out.push_back(c);
  }
  return out;
}

namespace {

double apag_of(const std::vector<GroupComparison>& groups) {
  if (groups.empty()) throw InvalidInput("apag: no parameter groups");
  std::size_t aligned = 0;
  for (const auto& g : groups) aligned += static_cast<std::size_t>(g.aligned);
  return static_cast<double>(aligned) / static_cast<double>(groups.size());
}

std::vector<LayerProportion> proportions_of(const std::vector<GroupComparison>& groups) {
  std::map<std::size_t, LayerProportion> by_layer;
  for (const auto& g : groups) {
    auto& lp = by_layer[g.group.layer];
    lp.layer = g.group.layer;
    ++lp.groups;
    lp.aligned += static_cast<std::size_t>(g.aligned);
  }
  std::vector<LayerProportion> out;
  for (auto& [layer, lp] : by_layer) {
    lp.proportion = static_cast<double>(lp.aligned) / static_cast<double>(lp.groups);
    out.push_back(lp);
  }
  return out;
}

CosineSummary cosine_of(const std::vector<GroupComparison>& groups) {
  std::map<std::size_t, std::pair<double, std::size_t>> by_layer;
  for (const auto& g : groups) {
    auto& [sum, n] = by_layer[g.group.layer];
    sum += g.cosine;
    ++n;
  }
  CosineSummary s;
  std::size_t positive = 0;
  for (const auto& [layer, acc] : by_layer) {
    const double mean = acc.first / static_cast<double>(acc.second);
    s.per_layer.push_back({layer, mean});
    s.scalar += mean;
    positive += mean > 0.0;
  }
  if (!s.per_layer.empty()) {
    s.scalar /= static_cast<double>(s.per_layer.size());
    s.positive_fraction = static_cast<double>(positive) / static_cast<double>(s.per_layer.size());
  }
  return s;
}

}  // namespace

double apag(const GradientSet& a, const GradientSet& b) { return apag_of(compare_gradients(a, b)); }

std::vector<LayerProportion> layer_alignment_proportions(const GradientSet& a,
                                                         const GradientSet& b) {
  return proportions_of(compare_gradients(a, b));
}

CosineSummary grad_cosine(const GradientSet& a, const GradientSet& b) {
  return cosine_of(compare_gradients(a, b));
}

AlignmentReport alignment_report(const GradientSet& a, const GradientSet& b) {
  AlignmentReport r;
  r.groups = compare_gradients(a, b);
  r.apag = apag_of(r.groups);
  r.layers = proportions_of(r.groups);
  r.cosine = cosine_of(r.groups);
  return r;
}

}  // namespace segalign
