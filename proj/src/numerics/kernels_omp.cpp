// SPDX-License-Identifier: Apache-2.0
#include "segalign/numerics/kernels.hpp"

#include <cstdint>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace segalign::kernels {

namespace {
// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelThreshold = 1u << 15;

bool worth_parallel(GemmShape s) { return s.m > 1 && s.m * s.n * s.k >= kParallelThreshold; }
}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {

namespace {

constexpr std::size_t kTileRows = 4;
constexpr std::size_t kTileCols = 8;

// c[i0:i0+4, j0:j0+8] with the accumulators held in registers. Lanes do a
// separately rounded multiply then add (no contraction), and every entry is
// summed over p in ascending order, as in the serial reference.
typedef double Lanes __attribute__((vector_size(4 * sizeof(double))));

inline void tile_4x8(const GemmShape& s, const double* __restrict a, const double* __restrict b,
                     double* __restrict c, std::size_t i0, std::size_t j0) {
  const std::size_t k = s.k;
  const std::size_t n = s.n;
  Lanes acc[kTileRows][2] = {};
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * n + j0;
    Lanes lo, hi;
    std::memcpy(&lo, bp, sizeof lo);
    std::memcpy(&hi, bp + 4, sizeof hi);
    for (std::size_t r = 0; r < kTileRows; ++r) {
      const double x = a[(i0 + r) * k + p];
      const Lanes xv = {x, x, x, x};
      acc[r][0] += xv * lo;
      acc[r][1] += xv * hi;
    }
  }
  for (std::size_t r = 0; r < kTileRows; ++r) {
    std::memcpy(c + (i0 + r) * n + j0, &acc[r][0], sizeof(Lanes));
    std::memcpy(c + (i0 + r) * n + j0 + 4, &acc[r][1], sizeof(Lanes));
  }
}

// Rows [i0, i1) of c, columns [j0, n), plain row streaming.
void edge(const GemmShape& s, const double* a, const double* b, double* c, std::size_t i0,
          std::size_t i1, std::size_t j0) {
  for (std::size_t i = i0; i < i1; ++i) {
    double* ci = c + i * s.n;
    for (std::size_t j = j0; j < s.n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < s.k; ++p) {
      const double aip = a[i * s.k + p];
      const double* bp = b + p * s.n;
      for (std::size_t j = j0; j < s.n; ++j) ci[j] += aip * bp[j];
    }
  }
}

std::vector<double> transposed(const double* x, std::size_t rows, std::size_t cols) {
  std::vector<double> t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t q = 0; q < cols; ++q) t[q * rows + r] = x[r * cols + q];
  }
  return t;
}

}  // namespace

void gemm_nn(GemmShape s, const double* a, const double* b, double* c) {
  const std::size_t full_rows = s.m / kTileRows * kTileRows;
  const std::size_t full_cols = s.n / kTileCols * kTileCols;
  const auto blocks = static_cast<std::int64_t>(full_rows / kTileRows);
#pragma omp parallel for schedule(static) if (worth_parallel(s))
  for (std::int64_t bi = 0; bi < blocks; ++bi) {
    const std::size_t i0 = static_cast<std::size_t>(bi) * kTileRows;
    for (std::size_t j0 = 0; j0 < full_cols; j0 += kTileCols) tile_4x8(s, a, b, c, i0, j0);
    if (full_cols < s.n) edge(s, a, b, c, i0, i0 + kTileRows, full_cols);
  }
  edge(s, a, b, c, full_rows, s.m, 0);
}

void gemm_tn(GemmShape s, const double* a, const double* b, double* c) {
  const std::vector<double> at = transposed(a, s.k, s.m);
  gemm_nn(s, at.data(), b, c);
}

void gemm_nt(GemmShape s, const double* a, const double* b, double* c) {
  const std::vector<double> bt = transposed(b, s.n, s.k);
  gemm_nn(s, a, bt.data(), c);
}

}  // namespace parallel
}  // namespace segalign::kernels
