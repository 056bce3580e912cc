// SPDX-License-Identifier: Apache-2.0
#include "segalign/analysis/box_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "segalign/numerics/errors.hpp"

namespace segalign {

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidInput("quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("box_stats: empty data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxStats s;
  s.min = v.front();
  s.max = v.back();
  s.q1 = sorted_quantile(v, 0.25);
  s.median = sorted_quantile(v, 0.5);
  s.q3 = sorted_quantile(v, 0.75);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

}  // namespace segalign
