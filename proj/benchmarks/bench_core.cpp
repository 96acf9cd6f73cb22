#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "ebtest/empirical_bayes.hpp"
#include "ebtest/procedures.hpp"
#include "ebtest/random.hpp"
#include "ebtest/simulation.hpp"
#include "ebtest/theory.hpp"

namespace {

ebtest::Observations sparse_data(std::size_t n) {
  ebtest::SignalConfig config;
  config.n = n;
  config.s_n = n / 100;
  config.v_n = 4.0;
  const std::uint64_t seed = 42;
  const auto theta0 = ebtest::generate_theta0(config, ebtest::substream_seed(seed, 0));
  return ebtest::Observations(ebtest::simulate_data(theta0, ebtest::substream_seed(seed, 1)));
}

void BM_EstimateW(benchmark::State& state) {
  const auto data = sparse_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ebtest::estimate_w(data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateW)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
  const auto data = sparse_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ebtest::analyze(data, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Analyze)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_CumulativeProcedure(benchmark::State& state) {
  const auto data = sparse_data(static_cast<std::size_t>(state.range(0)));
  const auto ell = ebtest::ell_values(data, ebtest::estimate_w(data).w_hat);
  for (auto _ : state) benchmark::DoNotOptimize(ebtest::cl_procedure(ell, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CumulativeProcedure)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);

void BM_TheoryReport(benchmark::State& state) {
  const auto regime = ebtest::ProblemRegime::with_defaults(
      static_cast<std::size_t>(state.range(0)), 500, 5.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ebtest::theory_report(regime));
}
BENCHMARK(BM_TheoryReport)->Arg(10000)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
