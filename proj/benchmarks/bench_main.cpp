#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "steinops/distributions.hpp"
#include "steinops/indicators.hpp"
#include "steinops/runs.hpp"

namespace {

std::vector<double> probs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.15);
  std::vector<double> p(n);
  for (double& v : p) v = u(rng);
  return p;
}

void BM_PoissonBinomial(benchmark::State& state) {
  const auto p = probs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(steinops::pmf_poisson_binomial(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PoissonBinomial)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_PanjerCompound(benchmark::State& state) {
  const steinops::SeverityLaw sev({0.0, 0.4, 0.3, 0.2, 0.1});
  const auto counting = steinops::PanjerCounting::poisson(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(steinops::pmf_compound_panjer(counting, sev));
}
BENCHMARK(BM_PanjerCompound)->Arg(5)->Arg(50)->Arg(500);

void BM_RunsLaw(benchmark::State& state) {
  const steinops::RunsModel m(static_cast<std::size_t>(state.range(0)), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(steinops::exact_runs_law(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RunsLaw)->RangeMultiplier(2)->Range(100, 1600)->Complexity();

void BM_Cor42(benchmark::State& state) {
  const auto p = probs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(steinops::bound_cor42(p));
}
BENCHMARK(BM_Cor42)->Arg(20)->Arg(80)->Arg(320);

}  // namespace

BENCHMARK_MAIN();
