// SPDX-License-Identifier: Apache-2.0
#include "segalign/analysis/cka.hpp"

#include <algorithm>
#include <cmath>

#include "segalign/numerics/errors.hpp"

namespace segalign {

double linear_cka(const Matrix& r1, const Matrix& r2, CkaNumerator numerator) {
  if (r1.rows() != r2.rows()) {
    throw InvalidInput("linear_cka: example counts differ (" + std::to_string(r1.rows()) +
                       " vs " + std::to_string(r2.rows()) + ")");
  }
  if (r1.rows() < 2) throw InvalidInput("linear_cka: need at least 2 examples");

  const Matrix x1 = center_columns(r1);
  const Matrix x2 = center_columns(r2);
  const double self1 = frobenius_norm(matmul_tn(x1, x1));
  const double self2 = frobenius_norm(matmul_tn(x2, x2));
  // Relative threshold: centring leaves rounding residue on constant input.
  const double scale1 = frobenius_norm(r1), scale2 = frobenius_norm(r2);
  if (self1 <= 1e-24 * scale1 * scale1 || self1 == 0.0 ||
      self2 <= 1e-24 * scale2 * scale2 || self2 == 0.0) {
    throw UndefinedSimilarity("linear_cka: activations are constant across examples");
  }
  const double cross = frobenius_norm(matmul_tn(x1, x2));
  const double num = numerator == CkaNumerator::Squared ? cross * cross : cross;
  return std::clamp(num / (self1 * self2), 0.0, 1.0);
}

CkaReport layerwise_cka(const ActivationStack& a, const ActivationStack& b) {
  if (a.layers.size() != b.layers.size()) {
    throw InvalidInput("layerwise_cka: layer counts differ");
  }
  if (a.pooled.rows() != b.pooled.rows()) {
    throw InvalidInput("layerwise_cka: probe batches differ in size");
  }
  CkaReport report;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    CkaLayer layer;
    layer.layer = l + 1;
    if (a.layers[l].size() != b.layers[l].size()) {
      throw InvalidInput("layerwise_cka: probe sets differ at layer " + std::to_string(l + 1));
    }
    for (std::size_t p = 0; p < a.layers[l].size(); ++p) {
      const auto& pa = a.layers[l][p];
      const auto& pb = b.layers[l][p];
      if (pa.label != pb.label || pa.activations.rows() != pb.activations.rows()) {
        throw InvalidInput("layerwise_cka: mismatched probe '" + pa.label + "' at layer " +
                           std::to_string(l + 1));
      }
      layer.labels.push_back(pa.label);
      layer.values.push_back(linear_cka(pa.activations, pb.activations));
    }
    layer.stats = box_stats(layer.values);
    report.layers.push_back(std::move(layer));
  }
  return report;
}

}  // namespace segalign
