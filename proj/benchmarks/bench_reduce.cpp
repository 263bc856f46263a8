#include <benchmark/benchmark.h>

#include "cil/oracles.hpp"
#include "cil/reduce.hpp"

using namespace cil;

static void BM_TsneRun(benchmark::State& state) {
  const auto x = oracle::uniform_points(static_cast<std::size_t>(state.range(0)), 16, 1.0, 4);
  reduce::TsneConfig cfg;
  cfg.iterations = 250;
  for (auto _ : state) benchmark::DoNotOptimize(reduce::tsne_run(x, cfg));
}
BENCHMARK(BM_TsneRun)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_PcaReduce(benchmark::State& state) {
  const auto x = oracle::uniform_points(static_cast<std::size_t>(state.range(0)), 3072, 1.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(reduce::pca_reduce(x, 2));
}
BENCHMARK(BM_PcaReduce)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
