#include <benchmark/benchmark.h>

#include "plkit/formula.hpp"
#include "plkit/invariants.hpp"

using namespace plkit;

static void BM_NonescapingBasilica(benchmark::State& state) {
  const auto pm = build_proper_map(parse_map("z^2-1"), Region::disk(0.0, 4.0));
  const int res = static_cast<int>(state.range(0));
  const GridSet shape = GridSet::square(0.0, 2.1, res);
  for (auto _ : state) {
    auto r = nonescaping_set(pm, domain_region(pm), shape, 200);
    benchmark::DoNotOptimize(r.K.count());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(res) * res);
}
BENCHMARK(BM_NonescapingBasilica)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
