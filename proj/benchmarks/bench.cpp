#include <benchmark/benchmark.h>

#include "housefolio/data.hpp"
#include "housefolio/oracle.hpp"
#include "housefolio/solver.hpp"
#include "housefolio/valuefn.hpp"

using namespace housefolio;

namespace {

Household reference_household() {
  Household hh;
  hh.id = "reference";
  hh.net_wealth = 159'542.0;
  hh.labor_income = 32'208.0;
  hh.total_income = 38'693.0;
  hh.housing_value = 204'552.0;
  return hh;
}

const PortfolioWeights kPoint{0.115, 0.06, 1.28212, -0.45712};

void BM_SelectCase(benchmark::State& state) {
  const Household hh = reference_household();
  const PeriodParams p = to_per_period(ModelParams::baseline(), hh.labor_ratio());
  for (auto _ : state) benchmark::DoNotOptimize(select_case(kPoint, p));
}
BENCHMARK(BM_SelectCase);

void BM_FixedPoint(benchmark::State& state) {
  const Household hh = reference_household();
  const PeriodParams p = to_per_period(ModelParams::baseline(), hh.labor_ratio());
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_f(kPoint, p, 1e-10));
}
BENCHMARK(BM_FixedPoint)->Unit(benchmark::kMillisecond);

void BM_SolveHousehold(benchmark::State& state) {
  const Household hh = reference_household();
  const GridSteps steps{0.005 / static_cast<double>(state.range(0)), 0.005 / static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(solve_household(hh, ModelParams::baseline(), steps));
}
BENCHMARK(BM_SolveHousehold)->Arg(1)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SolvePopulation(benchmark::State& state) {
  const auto hhs = synthesize_households(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_population(hhs, ModelParams::baseline()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolvePopulation)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const Household hh = reference_household();
  const PeriodParams p = to_per_period(ModelParams::baseline(), hh.labor_ratio());
  const double f = fixed_point_f(kPoint, p).f;
  SimulationOptions opts;
  opts.paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_policy(kPoint, p, f, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
