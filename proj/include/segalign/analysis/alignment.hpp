// SPDX-License-Identifier: Apache-2.0
#pragma once

// Gradient alignment between two models of the same topology.
//
// Two group gradients are aligned when their dot product is strictly
// positive; an exact zero counts as not aligned. APAG is the fraction of
// aligned (layer, head) groups over all groups, which reduces to the
// per-layer/per-head double average whenever every layer has the same head
// count.
//
// Classifier heads may differ in width between single-task models. Their
// group is compared over the leading classes both heads share (each class
// contributes its weight row and bias, see param_groups.hpp). Any other size
// difference is rejected.

#include <cstddef>
#include <span>
#include <vector>

#include "segalign/model/param_groups.hpp"

namespace segalign {

double grad_dot(std::span<const double> a, std::span<const double> b);

/// Heaviside step with θ(0) = 0.
inline int alignment_flag(double dot) noexcept { return dot > 0.0 ? 1 : 0; }

struct GroupComparison {
  ParamGroup group;
  std::size_t compared_length = 0;
  double dot = 0.0;
  double cosine = 0.0;  // 0 when either vector is zero
  int aligned = 0;
};

/// Per-group dot products and cosines. Throws InvalidInput on key mismatch.
std::vector<GroupComparison> compare_gradients(const GradientSet& a, const GradientSet& b);

double apag(const GradientSet& a, const GradientSet& b);

struct LayerProportion {
  std::size_t layer = 0;
  std::size_t groups = 0;
  std::size_t aligned = 0;
  double proportion = 0.0;
};

/// One entry per layer index, 0 (embedding) through N+1 (classifier).
std::vector<LayerProportion> layer_alignment_proportions(const GradientSet& a,
                                                         const GradientSet& b);

struct LayerCosine {
  std::size_t layer = 0;
  double mean_cosine = 0.0;
};

struct CosineSummary {
  double scalar = 0.0;  // mean over layers of the per-layer mean cosine
  std::vector<LayerCosine> per_layer;
  double positive_fraction = 0.0;  // share of per-layer means above zero
};

CosineSummary grad_cosine(const GradientSet& a, const GradientSet& b);

struct AlignmentReport {
  double apag = 0.0;
  std::vector<LayerProportion> layers;
  std::vector<GroupComparison> groups;
  CosineSummary cosine;
};

AlignmentReport alignment_report(const GradientSet& a, const GradientSet& b);

}  // namespace segalign
