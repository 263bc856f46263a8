#include <benchmark/benchmark.h>

#include "cil/oracles.hpp"
#include "cil/sampler.hpp"

using namespace cil;

static void BM_DssSample(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto pts = oracle::uniform_points(rows, 2, 20.0, 1);
  sampler::SamplerParams p;
  p.m = 50;
  p.n = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sampler::dss_sample(pts, p));
}
BENCHMARK(BM_DssSample)->ArgsProduct({{200, 500, 2000}, {0, 5}});

static void BM_GonzalezSample(benchmark::State& state) {
  const auto pts = oracle::uniform_points(static_cast<std::size_t>(state.range(0)), 2, 20.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sampler::gonzalez_sample(pts, 50));
}
BENCHMARK(BM_GonzalezSample)->Arg(200)->Arg(500)->Arg(2000);

static void BM_VerifyDss(benchmark::State& state) {
  const auto pts = oracle::uniform_points(static_cast<std::size_t>(state.range(0)), 2, 20.0, 3);
  sampler::SamplerParams p;
  p.m = 20;
  p.n = 3;
  const auto sel = sampler::dss_sample(pts, p);
  for (auto _ : state) benchmark::DoNotOptimize(sampler::verify_dss(pts, p, sel));
}
BENCHMARK(BM_VerifyDss)->Arg(200)->Arg(500);
