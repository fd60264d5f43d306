#include <benchmark/benchmark.h>

#include "plkit/ergodic.hpp"
#include "plkit/formula.hpp"

using namespace plkit;

static void BM_FeketeDisk(benchmark::State& state) {
  const GridSet X = rasterize_interior({JordanCurve::circle(0.0, 1.0, 4096)}, GridSet::square(0.0, 1.1, 1024));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto c = capacity_fekete(X, n);
    benchmark::DoNotOptimize(c.value);
  }
}
BENCHMARK(BM_FeketeDisk)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_GreenCapacity(benchmark::State& state) {
  const auto pm = build_proper_map(parse_map("z^2-1"), Region::disk(0.0, 4.0));
  for (auto _ : state) {
    auto c = capacity_green(pm);
    benchmark::DoNotOptimize(c.value);
  }
}
BENCHMARK(BM_GreenCapacity);
