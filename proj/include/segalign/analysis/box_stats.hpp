// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace segalign {

/// Five-number summary; quartiles by linear interpolation between order
/// statistics (position p*(n-1)).
struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double mean = 0.0;
};

BoxStats box_stats(std::span<const double> values);

/// Interpolated quantile of already-sorted data, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

}  // namespace segalign
