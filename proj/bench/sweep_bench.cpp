#include <benchmark/benchmark.h>

#include "minimax/complexity.hpp"

using namespace minimax;

namespace {

SweepSpec bench_spec() {
  SweepSpec s;
  s.kappa_grid = {2, 4, 8, 16, 32};
  s.eps = 1e-4;
  s.max_iters = 200000;
  s.base.dim_x = 10;
  s.base.dim_y = 10;
  return s;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto spec = bench_spec();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(spec));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto spec = bench_spec();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec, threads));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
