// SPDX-License-Identifier: Apache-2.0
#include "segalign/train/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "segalign/numerics/errors.hpp"
#include "segalign/numerics/rng.hpp"

namespace segalign {

SplitIndices stratified_split(std::span<const int> strata, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw InvalidInput("stratified_split: fraction must be in [0,1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < strata.size(); ++i) by_class[strata[i]].push_back(i);

  SplitIndices out;
  Rng rng(seed);
  for (auto& [label, members] : by_class) {
    if (fraction > 0.0 && members.size() < 2) {
      throw InvalidInput("stratified_split: class " + std::to_string(label) +
                         " has a single example; every class needs at least 2");
    }
    Rng class_rng = rng.split(static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
    class_rng.shuffle(std::span<std::size_t>(members));
    const auto n_val = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(members.size())));
    out.validation.insert(out.validation.end(), members.begin(),
                          members.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val),
                     members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

}  // namespace segalign
