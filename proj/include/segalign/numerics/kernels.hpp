// SPDX-License-Identifier: Apache-2.0
#pragma once

// Raw GEMM kernels behind the Matrix product functions.
//
// `parallel` kernels split output rows across OpenMP threads; every output
// element is reduced in the same k order as the serial reference, so both
// variants return bit-identical results for any thread count.

#include <cstddef>

namespace segalign::kernels {

struct GemmShape {
  std::size_t m;  // rows of C
  std::size_t n;  // cols of C
  std::size_t k;  // reduction length
};

namespace parallel {
// C = A B, A: m×k, B: k×n.
void gemm_nn(GemmShape s, const double* a, const double* b, double* c);
// C = Aᵀ B, A: k×m, B: k×n.
void gemm_tn(GemmShape s, const double* a, const double* b, double* c);
// C = A Bᵀ, A: m×k, B: n×k.
void gemm_nt(GemmShape s, const double* a, const double* b, double* c);
}  // namespace parallel

namespace serial {
void gemm_nn(GemmShape s, const double* a, const double* b, double* c);
void gemm_tn(GemmShape s, const double* a, const double* b, double* c);
void gemm_nt(GemmShape s, const double* a, const double* b, double* c);
}  // namespace serial

/// Threads the parallel kernels will use (1 when built without OpenMP).
int max_threads();

}  // namespace segalign::kernels
