#include <benchmark/benchmark.h>

#include "plkit/formula.hpp"
#include "plkit/periodic.hpp"

using namespace plkit;

static void BM_FindPeriodic(benchmark::State& state) {
  const auto pm = build_proper_map(parse_map("z^2-1"), Region::disk(0.0, 4.0));
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto scan = find_periodic(pm, p, pm.range);
    benchmark::DoNotOptimize(scan.dividing_points.size());
  }
}
BENCHMARK(BM_FindPeriodic)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);
