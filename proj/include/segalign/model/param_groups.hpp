// SPDX-License-Identifier: Apache-2.0
#pragma once

// Partition of a ParameterStore into (layer, head) groups, the unit over
// which cross-task gradient alignment is measured.
//
//   layer 0            embedding (token + position), one group
//   layer 1..N, head h attention slice: columns [h*dk,(h+1)*dk) of Wq/Wk/Wv
//                      and the same rows of Wo
//   layer 1..N         feed-forward group: both layer norms, ff1, ff2
//   layer N+1          classifier: every task head
//
// Total groups = 1 + N*(H+1) + 1.
//
// Flattened layouts are fixed. Classifier heads are laid out class by class
// (weight row c, then bias c), so heads of different widths agree on their
// leading classes.

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "segalign/model/config.hpp"
#include "segalign/model/parameters.hpp"

namespace segalign {

enum class GroupKind { Embedding, Attention, FeedForward, Classifier };

std::string_view to_string(GroupKind k) noexcept;
GroupKind group_kind_from_string(std::string_view s);

struct ParamGroup {
  std::size_t layer = 0;  // 0 embedding, 1..N encoder, N+1 classifier
  std::size_t head = 1;   // 1-based; attention heads 1..H, otherwise 1
  GroupKind kind = GroupKind::Embedding;
  std::size_t size = 0;   // parameter count

  /// Ordering key; size is not part of the identity.
  auto key() const noexcept { return std::tuple(layer, kind, head); }
  std::string label() const;
  friend bool operator==(const ParamGroup&, const ParamGroup&) = default;
};

std::vector<ParamGroup> param_groups(const ModelConfig& config);

/// Flattened per-group vectors, one per entry of param_groups(config).
class GradientSet {
 public:
  GradientSet() = default;
  GradientSet(std::vector<ParamGroup> groups, std::vector<std::vector<double>> vectors);

  static GradientSet zeros(const ModelConfig& config);

  const std::vector<ParamGroup>& groups() const noexcept { return groups_; }
  const std::vector<std::vector<double>>& vectors() const noexcept { return vectors_; }
  std::vector<std::vector<double>>& vectors() noexcept { return vectors_; }
  std::size_t size() const noexcept { return groups_.size(); }
  std::size_t total_size() const noexcept;

  GradientSet& operator+=(const GradientSet& other);
  GradientSet& operator*=(double s) noexcept;
  friend bool operator==(const GradientSet&, const GradientSet&) = default;

 private:
  std::vector<ParamGroup> groups_;
  std::vector<std::vector<double>> vectors_;
};

/// Flattens store-shaped gradients into their groups.
GradientSet group_gradients(const ParameterStore& grads);
/// Inverse of group_gradients: scatters group vectors back into `out`.
void scatter_groups(const GradientSet& set, ParameterStore& out);

}  // namespace segalign
