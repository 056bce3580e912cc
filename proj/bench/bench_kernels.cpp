// SPDX-License-Identifier: Apache-2.0
// Serial reference vs OpenMP GEMM kernels on the shapes the encoder uses
// (packed tokens × d_model against d_model-sized weights) and on one square
// shape. Run with OMP_NUM_THREADS to compare thread counts.

#include <vector>

#include <benchmark/benchmark.h>

#include "segalign/numerics/kernels.hpp"
#include "segalign/numerics/rng.hpp"

namespace {

using segalign::kernels::GemmShape;
using Kernel = void (*)(GemmShape, const double*, const double*, double*);

std::vector<double> filled(std::size_t n, std::uint64_t seed) {
  segalign::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Operand sizes depend on the layout: nn A m×k B k×n, tn A k×m B k×n,
// nt A m×k B n×k.
void run(benchmark::State& state, Kernel kernel) {
  const GemmShape s{static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)),
                    static_cast<std::size_t>(state.range(2))};
  const auto a = filled(s.m * s.k, 1);
  const auto b = filled(s.k * s.n, 2);
  std::vector<double> c(s.m * s.n);
  for (auto _ : state) {
    kernel(s, a.data(), b.data(), c.data());
    benchmark::DoNotOptimize(c.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.m * s.n * s.k));
  state.counters["threads"] = segalign::kernels::max_threads();
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({2048, 32, 32})    // projections over a packed batch
      ->Args({2048, 64, 32})  // feed-forward up
      ->Args({2048, 32, 64})  // feed-forward down
      ->Args({256, 256, 256});
}

void serial_nn(benchmark::State& s) { run(s, segalign::kernels::serial::gemm_nn); }
void parallel_nn(benchmark::State& s) { run(s, segalign::kernels::parallel::gemm_nn); }
void serial_tn(benchmark::State& s) { run(s, segalign::kernels::serial::gemm_tn); }
void parallel_tn(benchmark::State& s) { run(s, segalign::kernels::parallel::gemm_tn); }
void serial_nt(benchmark::State& s) { run(s, segalign::kernels::serial::gemm_nt); }
void parallel_nt(benchmark::State& s) { run(s, segalign::kernels::parallel::gemm_nt); }

BENCHMARK(serial_nn)->Apply(shapes);
BENCHMARK(parallel_nn)->Apply(shapes);
BENCHMARK(serial_tn)->Apply(shapes);
BENCHMARK(parallel_tn)->Apply(shapes);
BENCHMARK(serial_nt)->Apply(shapes);
BENCHMARK(parallel_nt)->Apply(shapes);

}  // namespace

BENCHMARK_MAIN();
