#include <benchmark/benchmark.h>

#include "gdpkit/gdp_solve.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gdpkit;

const GdpModel& instance(std::int64_t which) {
  static const GdpModel rect = testing::two_rectangle();
  static const GdpModel plant = testing::superstructure();
  static const GdpModel chain = testing::nested_chain();
  switch (which) {
    case 0: return rect;
    case 1: return plant;
    default: return chain;
  }
}

void BM_Reformulate(benchmark::State& state) {
  const GdpModel& m = instance(state.range(0));
  ReformulateOptions opts;
  opts.method = state.range(1) == 0 ? Method::kBigM : Method::kHull;
  for (auto _ : state) benchmark::DoNotOptimize(reformulate(m, opts));
}
BENCHMARK(BM_Reformulate)->ArgsProduct({{0, 1, 2}, {0, 1}});

void BM_SolveMip(benchmark::State& state) {
  const GdpModel& m = instance(state.range(0));
  ReformulateOptions opts;
  opts.method = state.range(1) == 0 ? Method::kBigM : Method::kHull;
  const MilpModel milp = reformulate(m, opts).milp;
  for (auto _ : state) benchmark::DoNotOptimize(solve_mip(milp));
}
BENCHMARK(BM_SolveMip)->ArgsProduct({{0, 1, 2}, {0, 1}});

void BM_RootLp(benchmark::State& state) {
  const MilpModel milp = reformulate_bigm(instance(state.range(0))).milp;
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(milp));
}
BENCHMARK(BM_RootLp)->DenseRange(0, 2);

void BM_DisjunctiveBb(benchmark::State& state) {
  const GdpModel& m = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_disjunctive_bb(m));
}
BENCHMARK(BM_DisjunctiveBb)->DenseRange(0, 2);

void BM_HybridCuts(benchmark::State& state) {
  const GdpModel& m = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_hybrid_cuts(m));
}
BENCHMARK(BM_HybridCuts)->DenseRange(0, 2);

void BM_CorpusBigM(benchmark::State& state) {
  const auto& corpus = testing::corpus();
  for (auto _ : state) {
    for (const auto& m : corpus) benchmark::DoNotOptimize(solve_mip(reformulate_bigm(m).milp));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_CorpusBigM)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
