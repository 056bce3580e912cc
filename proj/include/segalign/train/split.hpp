// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace segalign {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Per-class random split: class c sends round(fraction · count_c) of its
/// members to validation. Both index lists come back sorted. Throws
/// InvalidInput when fraction > 0 and some class has a single member.
SplitIndices stratified_split(std::span<const int> strata, double fraction, std::uint64_t seed);

}  // namespace segalign
