#include <benchmark/benchmark.h>

#include "plkit/formula.hpp"
#include "plkit/pullback.hpp"
#include "plkit/trichotomy.hpp"

using namespace plkit;

static void BM_PullbackCircle(benchmark::State& state) {
  const auto pm = build_proper_map(parse_map("z^2-1"), Region::disk(0.0, 4.0));
  const auto gamma = JordanCurve::circle(0.0, 3.6, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto pb = pullback_curve(pm, gamma);
    benchmark::DoNotOptimize(pb.components.size());
  }
}
BENCHMARK(BM_PullbackCircle)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_ClassifyRabbit(benchmark::State& state) {
  const auto pm = build_proper_map(parse_map("z^2-0.12+0.75i"), Region::disk(0.0, 4.0));
  const auto gamma = JordanCurve::circle(0.0, 3.6, 512);
  for (auto _ : state) {
    auto v = classify(pm, gamma, 12);
    benchmark::DoNotOptimize(v.witness_n);
  }
}
BENCHMARK(BM_ClassifyRabbit)->Unit(benchmark::kMillisecond);
