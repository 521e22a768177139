#include <benchmark/benchmark.h>

#include "openmap/phase_space.hpp"
#include "openmap/spectral.hpp"
#include "openmap/walsh.hpp"

using namespace openmap;

static void BM_OpenPropagator(benchmark::State& state) {
  const int n = static_cast<int>(pow3(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(open_propagator(n));
}
BENCHMARK(BM_OpenPropagator)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

static void BM_WalshOpenMap(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(walsh_open_baker(k));
}
BENCHMARK(BM_WalshOpenMap)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

static void BM_Eigendecompose(benchmark::State& state) {
  const ComplexMatrix u = open_propagator(static_cast<int>(pow3(static_cast<int>(state.range(0)))));
  const bool left = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(u, {left}));
}
BENCHMARK(BM_Eigendecompose)->ArgsProduct({{4, 5, 6}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_DeflatedWalsh(benchmark::State& state) {
  const ComplexMatrix u = walsh_open_baker(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose_deflated(u, kWalshZeroThreshold, {false}));
}
BENCHMARK(BM_DeflatedWalsh)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

static void BM_HusimiGrid(benchmark::State& state) {
  const int n = static_cast<int>(pow3(static_cast<int>(state.range(0))));
  const ComplexVector v = coherent_state(TorusPoint(0.2, 0.7), n).vector;
  const int g = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(husimi_grid(v, g));
}
BENCHMARK(BM_HusimiGrid)->ArgsProduct({{5, 6, 7}, {81}})->Unit(benchmark::kMillisecond);

static void BM_WignerGrid(benchmark::State& state) {
  const int n = static_cast<int>(pow3(static_cast<int>(state.range(0))));
  const ComplexVector v = coherent_state(TorusPoint(0.2, 0.7), n).vector;
  for (auto _ : state) benchmark::DoNotOptimize(wigner_grid(v));
}
BENCHMARK(BM_WignerGrid)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
