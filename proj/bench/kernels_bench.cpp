// Serial reference vs OpenMP kernels on the hot loops.
#include <benchmark/benchmark.h>

#include "teichlab/ergodic.hpp"
#include "teichlab/kernels.hpp"
#include "teichlab/spectral_torus.hpp"

using namespace teichlab;

namespace {

template <bool Parallel>
void BM_WeylCount(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::omp::weyl_count(lambda));
    else benchmark::DoNotOptimize(kernels::serial::weyl_count(lambda));
  }
}

template <bool Parallel>
void BM_ModeSupRatio(benchmark::State& state) {
  const double theta = torus::golden_theta();
  const int nmax = static_cast<int>(state.range(0));
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::omp::mode_sup_ratio(theta, 0.1, nmax, 1e-13));
    else benchmark::DoNotOptimize(kernels::serial::mode_sup_ratio(theta, 0.1, nmax, 1e-13));
  }
}

template <bool Parallel>
void BM_OrbitSums(benchmark::State& state) {
  Rng rng(1);
  const Iet t = random_iet(Permutation::rotation_class(4), rng);
  const ExchangeMap m(t);
  const std::vector<double> values{0.3, -0.1, -0.4, 0.2};
  std::vector<double> starts(8);
  for (double& s : starts) s = uniform01(rng);
  const auto n = geometric_grid(static_cast<std::uint64_t>(state.range(0)), 1.25);
  for (auto _ : state) {
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::omp::orbit_sums(m, values, starts, n));
    else benchmark::DoNotOptimize(kernels::serial::orbit_sums(m, values, starts, n));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(starts.size()) * state.range(0));
}

}  // namespace

BENCHMARK(BM_WeylCount<false>)->Arg(100000)->Arg(10000000);
BENCHMARK(BM_WeylCount<true>)->Arg(100000)->Arg(10000000);
BENCHMARK(BM_ModeSupRatio<false>)->Arg(64)->Arg(256);
BENCHMARK(BM_ModeSupRatio<true>)->Arg(64)->Arg(256);
BENCHMARK(BM_OrbitSums<false>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrbitSums<true>)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
