// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <vector>

#include "arqshare/optimizer.hpp"
#include "arqshare/parallel.hpp"
#include "arqshare/simulator.hpp"

namespace {

arqshare::SimConfig sim_config(std::uint64_t trials) {
  arqshare::SimConfig c;
  c.outage = arqshare::OutageVector({0.2, 0.15, 0.3, 0.1, 0.25, 0.2});
  c.q = arqshare::ArqAllocation({3, 2, 3, 2, 3, 2});
  c.trials = trials;
  c.seed = 1;
  return c;
}

arqshare::FoldContext search_context(int q_sum) {
  return {arqshare::OutageVector({0.05, 0.08, 0.03, 0.06, 0.04, 0.07}), q_sum};
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto cfg = sim_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(arqshare::estimate_pdp_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto cfg = sim_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(arqshare::estimate_pdp(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = arqshare::parallel::max_threads();
}

void BM_ExhaustiveSerial(benchmark::State& state) {
  const auto ctx = search_context(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(arqshare::exhaustive_search_serial(ctx));
}

void BM_ExhaustiveParallel(benchmark::State& state) {
  const auto ctx = search_context(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(arqshare::exhaustive_search(ctx));
  state.counters["threads"] = arqshare::parallel::max_threads();
}

void BM_OneFold(benchmark::State& state) {
  const auto ctx = search_context(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(arqshare::onefold_search(ctx));
}

void BM_Greedy(benchmark::State& state) {
  const auto ctx = search_context(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(arqshare::greedy_multifold(ctx));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExhaustiveSerial)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExhaustiveParallel)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OneFold)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Greedy)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
