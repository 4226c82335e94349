#include <benchmark/benchmark.h>

#include "ergo/builders.hpp"
#include "ergo/recurrence.hpp"
#include "ergo/towerplex.hpp"

using namespace ergo;

static void BM_BuildStage(benchmark::State& state) {
  const auto recipe = *builtinRecipe(state.range(0) == 0 ? "odometer" : "staircase");
  const int stage = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(buildStage(recipe, stage));
}
BENCHMARK(BM_BuildStage)->Args({0, 8})->Args({0, 12})->Args({1, 4})->Args({1, 6})->Unit(benchmark::kMillisecond);

static void BM_CorrelationTable(benchmark::State& state) {
  const auto t = buildStage(*builtinRecipe("odometer"), 10);
  const IntervalSet A = t.levelRange(0, t.height() / 3) | t.levelRange(t.height() / 2, t.height() / 2 + 7);
  for (auto _ : state) benchmark::DoNotOptimize(correlationTable(t.map, A, A, state.range(0)));
}
BENCHMARK(BM_CorrelationTable)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Towerplex(benchmark::State& state) {
  TowerplexConfig c;
  c.stages = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(runTowerplex(c));
}
BENCHMARK(BM_Towerplex)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
