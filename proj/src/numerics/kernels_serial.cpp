// SPDX-License-Identifier: Apache-2.0
// Reference GEMM. Kept free of OpenMP; the parallel kernels are tested
// against these for bit-identical output.
#include "segalign/numerics/kernels.hpp"

namespace segalign::kernels::serial {

void gemm_nn(GemmShape s, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < s.m; ++i) {
    double* ci = c + i * s.n;
    for (std::size_t j = 0; j < s.n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < s.k; ++p) {
      const double aip = a[i * s.k + p];
      const double* bp = b + p * s.n;
      for (std::size_t j = 0; j < s.n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void gemm_tn(GemmShape s, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < s.m; ++i) {
    double* ci = c + i * s.n;
    for (std::size_t j = 0; j < s.n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < s.k; ++p) {
      const double api = a[p * s.m + i];
      const double* bp = b + p * s.n;
      for (std::size_t j = 0; j < s.n; ++j) ci[j] += api * bp[j];
    }
  }
}

void gemm_nt(GemmShape s, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < s.m; ++i) {
    const double* ai = a + i * s.k;
    for (std::size_t j = 0; j < s.n; ++j) {
      const double* bj = b + j * s.k;
      double acc = 0.0;
      for (std::size_t p = 0; p < s.k; ++p) acc += ai[p] * bj[p];
      c[i * s.n + j] = acc;
    }
  }
}

}  // namespace segalign::kernels::serial
