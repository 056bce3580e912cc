// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "segalign/analysis/box_stats.hpp"
#include "segalign/model/encoder.hpp"
#include "segalign/numerics/matrix.hpp"

namespace segalign {

/// Raised when an activation matrix is constant across examples, which makes
/// the similarity index 0/0.
class UndefinedSimilarity : public std::domain_error {
 public:
  explicit UndefinedSimilarity(const std::string& what) : std::domain_error(what) {}
};

enum class CkaNumerator {
  Squared,    // ||X1ᵀX2||²_F, the standard linear CKA
  Unsquared,  // ||X1ᵀX2||_F, kept only for comparison
};

/// Linear CKA between two views of the same N examples (columns may differ).
/// Columns are mean-centred first; the result is clamped to [0, 1].
double linear_cka(const Matrix& r1, const Matrix& r2,
                  CkaNumerator numerator = CkaNumerator::Squared);

struct CkaLayer {
  std::size_t layer = 0;  // 1-based encoder layer
  std::vector<std::string> labels;
  std::vector<double> values;
  BoxStats stats;
};

struct CkaReport {
  std::vector<CkaLayer> layers;
};

/// Same-depth, same-probe CKA for two activation stacks captured on one
/// probe batch.
CkaReport layerwise_cka(const ActivationStack& a, const ActivationStack& b);

}  // namespace segalign
