// SPDX-License-Identifier: Apache-2.0
#pragma once

// Test-only reference computations. Each one takes a different algebraic
// route from the library code it checks.

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "segalign/model/param_groups.hpp"
#include "segalign/numerics/matrix.hpp"
#include "segalign/numerics/rng.hpp"

namespace segalign::oracle {

/// Linear CKA through centred Gram matrices (N×N), i.e. the HSIC form
/// tr(Kc Lc) / sqrt(tr(Kc Kc) tr(Lc Lc)), with plain loops.
inline double cka_via_gram(const Matrix& x, const Matrix& y) {
  const std::size_t n = x.rows();
  auto gram = [n](const Matrix& m) {
    std::vector<double> k(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) s += m(i, c) * m(j, c);
        k[i * n + j] = s;
      }
    // H K H with H = I - 11ᵀ/n
    std::vector<double> row(n, 0.0), col(n, 0.0);
    double all = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        row[i] += k[i * n + j] / n;
        col[j] += k[i * n + j] / n;
        all += k[i * n + j] / (double(n) * n);
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) k[i * n + j] += all - row[i] - col[j];
    return k;
  };
  auto kx = gram(x), ky = gram(y);
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    xy += kx[i] * ky[i];
    xx += kx[i] * kx[i];
    yy += ky[i] * ky[i];
  }
  return xy / std::sqrt(xx * yy);
}

/// Random d×d orthogonal matrix via modified Gram-Schmidt.
inline Matrix random_orthogonal(std::size_t d, Rng& rng) {
  Matrix q(d, d);
  for (double& v : q.values()) v = rng.normal();
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += q(r, c) * q(r, p);
      for (std::size_t r = 0; r < d; ++r) q(r, c) -= dot * q(r, p);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < d; ++r) norm += q(r, c) * q(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < d; ++r) q(r, c) /= norm;
  }
  return q;
}

struct BruteAlignment {
  double apag = 0.0;
  std::map<std::size_t, double> layer_proportion;
};

/// Flatten both sets into one long vector each, then walk the group
/// boundaries, summing products, flagging, and counting.
inline BruteAlignment brute_alignment(const GradientSet& a, const GradientSet& b) {
  std::vector<double> fa, fb;
  std::vector<std::size_t> bounds_a{0}, bounds_b{0};
  for (const auto& v : a.vectors()) {
    fa.insert(fa.end(), v.begin(), v.end());
    bounds_a.push_back(fa.size());
  }
  for (const auto& v : b.vectors()) {
    fb.insert(fb.end(), v.begin(), v.end());
    bounds_b.push_back(fb.size());
  }
  std::size_t aligned = 0;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_layer;
  for (std::size_t g = 0; g + 1 < bounds_a.size(); ++g) {
    const std::size_t len =
        std::min(bounds_a[g + 1] - bounds_a[g], bounds_b[g + 1] - bounds_b[g]);
    long double dot = 0.0L;
    for (std::size_t i = 0; i < len; ++i) {
      dot += static_cast<long double>(fa[bounds_a[g] + i]) * fb[bounds_b[g] + i];
    }
    const bool flag = dot > 0.0L;
    aligned += flag;
    auto& [n, k] = per_layer[a.groups()[g].layer];
    ++n;
    k += flag;
  }
  BruteAlignment out;
  out.apag = double(aligned) / double(a.size());
  for (const auto& [layer, nk] : per_layer) out.layer_proportion[layer] = double(nk.second) / nk.first;
  return out;
}

/// Macro F1 from an explicit confusion matrix via per-class precision and
/// recall (harmonic mean), F1 = 0 when precision + recall = 0.
inline double macro_f1_confusion(const std::vector<std::size_t>& pred,
                                 const std::vector<std::size_t>& gold, std::size_t k) {
  std::vector<std::vector<std::size_t>> cm(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) ++cm[gold[i]][pred[i]];
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t col = 0, row = 0;
    for (std::size_t o = 0; o < k; ++o) {
      col += cm[o][c];
      row += cm[c][o];
    }
    const double precision = col == 0 ? 0.0 : double(cm[c][c]) / col;
    const double recall = row == 0 ? 0.0 : double(cm[c][c]) / row;
    sum += (precision + recall) == 0.0 ? 0.0 : 2 * precision * recall / (precision + recall);
  }
  return sum / k;
}

}  // namespace segalign::oracle
