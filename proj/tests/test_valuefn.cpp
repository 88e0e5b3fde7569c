#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "housefolio/oracle.hpp"
#include "housefolio/valuefn.hpp"

using namespace housefolio;

namespace {

constexpr std::array<std::array<std::size_t, 3>, 6> kPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

/// Per-period market with wide stock dispersion and the state returns
/// permuted, so that every binding pattern occurs for small stock shares.
PeriodParams dispersed_period(std::size_t perm) {
  PeriodParams p = test::baseline_period(0.0);
  const std::array<double, 3> returns{0.5, 0.05, -0.3};
  for (std::size_t i = 0; i < 3; ++i) p.stock_return[i] = returns[kPermutations[perm][i]];
  p.housing_return = 0.0;
  p.mortgage_rate = 0.0;
  p.deposit_return = 0.0;
  return p;
}

const double kAvgLabor = 32'208.0 / 159'542.0;

}  // namespace

TEST_SUITE("valuefn") {
  TEST_CASE("housing-only portfolio with zero housing return earns nothing") {
    PeriodParams p = test::baseline_period(0.0);
    p.housing_return = 0.0;
    const StateReturns sr = state_returns(PortfolioWeights{0.0, 0.0, 1.0, 0.0}, p);
    for (State s : kStates) {
      CHECK(sr.net[s] == 0.0);
      CHECK(sr.gross[s] == 1.0);
    }
  }

  TEST_CASE("all-stock portfolio earns the stock return per state") {
    const PeriodParams p = test::baseline_period(0.0);
    const StateReturns sr = state_returns(PortfolioWeights{1.0, 0.0, 0.0, 0.0}, p);
    for (State s : kStates) CHECK(sr.net[s] == p.stock_return[s]);
  }

  TEST_CASE("portfolio return is the dot product of weights and returns") {
    const PeriodParams p = test::baseline_period(kAvgLabor);
    const PortfolioWeights w{0.016, 0.049, 1.282, -0.347};
    const StateReturns sr = state_returns(w, p);
    for (State s : kStates) {
      const std::array<double, 4> a{w.stocks, w.deposits, w.housing, w.mortgage};
      const std::array<double, 4> r{p.stock_return[s], p.deposit_return, p.housing_return, p.mortgage_rate};
      double dot = 0.0;
      for (std::size_t i = 0; i < 4; ++i) dot += a[i] * r[i];
      CHECK(sr.net[s] == doctest::Approx(dot).epsilon(1e-14));
      const double lw = w.stocks + w.deposits * (1.0 - p.fee) + dot - w.deposits * p.deposit_return + p.labor_ratio;
      CHECK(sr.liquid[s] == doctest::Approx(lw).epsilon(1e-14));
      CHECK(sr.resources[s] - sr.liquid[s] == doctest::Approx(sr.retained).epsilon(1e-12));
    }
    CHECK(sr.net[State::High] >= sr.net[State::Mid]);
    CHECK(sr.net[State::Mid] >= sr.net[State::Low]);
  }

  TEST_CASE("closed form with identical states collapses to a single state") {
    PeriodParams p = test::baseline_period(0.0);
    for (State s : kStates) p.stock_return[s] = 0.01;
    const PortfolioWeights w{0.002, 0.0, 1.282, -0.284};
    const double spread = f1_closed(w, p);
    PeriodParams single = p;
    single.prob[State::High] = 1.0;
    single.prob[State::Mid] = 0.0;
    single.prob[State::Low] = 0.0;
    CHECK(f1_closed(w, single) == doctest::Approx(spread).epsilon(1e-14));
  }

  TEST_CASE("closed form ignores the shock probability when gamma is one") {
    PeriodParams p = test::baseline_period(0.0);
    p.gamma = 1.0;
    const PortfolioWeights w{0.002, 0.0, 1.282, -0.284};
    const double base = f1_closed(w, p);
    for (double mu : {0.0, 0.01, 0.3, 1.0}) {
      p.mu = mu;
      CHECK(f1_closed(w, p) == doctest::Approx(base).epsilon(1e-14));
    }
  }

  TEST_CASE("closed form matches the fixed-point oracle where all constraints bind") {
    const PeriodParams p = test::baseline_period(0.0);
    for (double m : {-0.282, -0.5, -0.8, -1.0}) {
      const PortfolioWeights w{0.0, 0.0, 1.0 - m, m};
      const Evaluation ev = select_case(w, p);
      REQUIRE(ev.status == EvalStatus::Ok);
      CHECK(ev.case_id == CaseId::F1);
      const double f1 = f1_closed(w, p);
      CHECK(ev.value == f1);
      CHECK(test::rel_diff(f1, fixed_point_f(w, p).f) < 1e-6);
    }
  }

  TEST_CASE("nonpositive liquid wealth is reported") {
    const PeriodParams p = test::baseline_period(0.0);
    const PortfolioWeights w{0.0, 0.0, 6.0, -5.0};  // mortgage interest exceeds the housing return
    CHECK(state_returns(w, p).liquid[State::Low] <= 0.0);
    CHECK_THROWS_WITH_AS(f1_closed(w, p), "liquidity bankrupt state", LiquidityBankrupt);
    CHECK_THROWS_AS(f_implicit(CaseId::F2, w, p), LiquidityBankrupt);
    CHECK(select_case(w, p).status == EvalStatus::LiquidityBankrupt);
  }

  TEST_CASE("implicit root has a residual below 1e-12") {
    const PeriodParams p = test::baseline_period(kAvgLabor);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    const double f = f_implicit(CaseId::F2, w, p);
    CHECK(f > 0.0);
    CHECK(std::abs(case_residual(CaseId::F2, f, state_returns(w, p), p)) <= 1e-12);
    CHECK_THROWS_AS(f_implicit(CaseId::F1, w, p), ValueFunctionError);
  }

  TEST_CASE("case-selected values agree with the fixed-point oracle at random grid points") {
    const Household hh = test::average_household();
    const PeriodParams p = test::baseline_period(hh.labor_ratio());
    std::size_t checked = 0;
    for (const auto& w : test::random_grid_points(hh, 40, 11)) {
      const Evaluation ev = select_case(w, p);
      if (ev.status != EvalStatus::Ok) continue;
      const FixedPointReport fp = fixed_point_f(w, p);
      REQUIRE(fp.converged);
      CHECK(test::rel_diff(ev.value, fp.f) < 1e-6);
      if (++checked == 10) break;
    }
    CHECK(checked == 10);
  }

  TEST_CASE("every binding pattern occurs and agrees with the oracle") {
    std::set<CaseId> seen;
    for (std::size_t perm = 0; perm < kPermutations.size(); ++perm) {
      const PeriodParams p = dispersed_period(perm);
      for (int k = 1; k <= 8; ++k) {
        const double a1 = 0.0005 * k;
        const PortfolioWeights w{a1, 0.0, 1.0 - a1, 0.0};
        const Evaluation ev = select_case(w, p);
        REQUIRE(ev.status == EvalStatus::Ok);
        seen.insert(ev.case_id);
        CHECK(case_consistent(ev.case_id, ev.consumption));
        if (ev.case_id != CaseId::F1) {
          CHECK(std::abs(case_residual(ev.case_id, ev.value, state_returns(w, p), p)) <= 1e-12);
        }
        const FixedPointReport fp = fixed_point_f(w, p);
        REQUIRE(fp.converged);
        INFO("case " << case_name(ev.case_id) << " perm " << perm << " a1 " << a1);
        CHECK(test::rel_diff(ev.value, fp.f) < 1e-6);
      }
    }
    CHECK(seen.size() == 8);
  }

  TEST_CASE("high-and-mid binding case satisfies its consumption conditions") {
    // Low state carries the best stock return, so only it is unconstrained.
    const PeriodParams p = dispersed_period(5);
    const PortfolioWeights w{0.0015, 0.0, 0.9985, 0.0};
    const Evaluation ev = select_case(w, p);
    REQUIRE(ev.case_id == CaseId::F3);
    const ConsumptionSchedule& c = ev.consumption;
    CHECK(c.foc[State::High] > c.liquid[State::High]);
    CHECK(c.foc[State::Mid] > c.liquid[State::Mid]);
    CHECK(c.foc[State::Low] <= c.liquid[State::Low]);
    CHECK(c.normal[State::Low] == c.foc[State::Low]);
    CHECK(std::abs(case_residual(CaseId::F3, ev.value, state_returns(w, p), p)) <= 1e-12);
  }

  TEST_CASE("consumption schedule follows the min rule") {
    const PeriodParams p = test::baseline_period(kAvgLabor);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    const StateReturns sr = state_returns(w, p);
    const ConsumptionSchedule tiny = consumption_from_f(1e-12, sr, p);
    for (State s : kStates) {
      CHECK(tiny.foc[s] < 1e-10);
      CHECK(tiny.normal[s] == tiny.foc[s]);
      CHECK(tiny.shock[s] == sr.liquid[s]);
    }
    // lw = 0.10 and foc = 0.25 give normal consumption 0.10.
    StateReturns fake = sr;
    for (State s : kStates) {
      fake.liquid[s] = 0.10;
      fake.resources[s] = 1.0;
    }
    const double k = std::pow(p.beta, -1.0 / p.theta);
    const double f = 0.25 / (k * (1.0 - 0.25));  // k f / (1 + k f) = 0.25
    const ConsumptionSchedule c = consumption_from_f(f, fake, p);
    for (State s : kStates) {
      CHECK(c.foc[s] == doctest::Approx(0.25).epsilon(1e-14));
      CHECK(c.normal[s] == 0.10);
    }
  }

  TEST_CASE("normal-regime consumption is ordered by state at the average portfolio") {
    const PeriodParams p = test::baseline_period(kAvgLabor);
    const Evaluation ev = select_case(PortfolioWeights{0.016, 0.049, 1.282, -0.347}, p);
    REQUIRE(ev.status == EvalStatus::Ok);
    const auto& c = ev.consumption.normal;
    CHECK(c[State::Low] <= c[State::Mid]);
    CHECK(c[State::Mid] <= c[State::High]);
  }

  TEST_CASE("liquid deposits without a fee select the unconstrained case") {
    PeriodParams p = test::baseline_period(0.0);
    p.fee = 0.0;
    p.beta = std::pow(0.99, 1.0 / 12.0);
    const PortfolioWeights w{0.0, 0.02, 0.98, 0.0};
    const Evaluation ev = select_case(w, p);
    REQUIRE(ev.status == EvalStatus::Ok);
    CHECK(ev.case_id == CaseId::F2);
    for (State s : kStates) CHECK(ev.consumption.foc[s] <= ev.consumption.liquid[s]);
  }

  TEST_CASE("illiquid leveraged portfolio without labor income binds everywhere") {
    const PeriodParams p = test::baseline_period(0.0);
    const Evaluation ev = select_case(PortfolioWeights{0.0, 0.0, 1.5, -0.5}, p);
    REQUIRE(ev.status == EvalStatus::Ok);
    CHECK(ev.case_id == CaseId::F1);
    for (State s : kStates) CHECK(ev.consumption.foc[s] > ev.consumption.liquid[s]);
  }

  TEST_CASE("shock regime consumes exactly liquid wealth") {
    const Household hh = test::average_household();
    const PeriodParams p = test::baseline_period(hh.labor_ratio());
    for (const auto& w : test::random_grid_points(hh, 50, 5)) {
      const Evaluation ev = select_case(w, p);
      if (ev.status != EvalStatus::Ok) continue;
      const StateReturns sr = state_returns(w, p);
      for (State s : kStates) {
        CHECK(ev.consumption.shock[s] == sr.liquid[s]);
        CHECK(ev.consumption.normal[s] > 0.0);
        CHECK(ev.consumption.normal[s] <= sr.liquid[s]);
      }
    }
  }

  TEST_CASE("binding patterns are monotone across the baseline grid") {
    const Household hh = test::average_household();
    const PeriodParams p = test::baseline_period(hh.labor_ratio());
    const auto region = feasible_region(hh, BankingPolicy{}, MarketParams{});
    std::size_t nonmonotone = 0;
    for (const auto& w : generate_grid(*region, GridSteps{0.02, 0.02})) {
      const Evaluation ev = select_case(w, p);
      if (ev.status == EvalStatus::Ok && !binding_pattern_monotone(ev.case_id)) ++nonmonotone;
    }
    CHECK(nonmonotone == 0);
  }

  TEST_CASE("shock probability is inert with gamma one where every constraint binds") {
    PeriodParams p = test::baseline_period(0.0);
    p.gamma = 1.0;
    const PortfolioWeights w{0.0, 0.0, 1.5, -0.5};
    const Evaluation base = select_case(w, p);
    REQUIRE(base.case_id == CaseId::F1);
    for (double mu : {0.0, 0.05, 0.5}) {
      p.mu = mu;
      const Evaluation ev = select_case(w, p);
      CHECK(ev.case_id == base.case_id);
      CHECK(ev.value == doctest::Approx(base.value).epsilon(1e-14));
    }
  }

  TEST_CASE("portfolios with a large liquid share have no finite value") {
    const PeriodParams p = test::baseline_period(kAvgLabor);
    const PortfolioWeights w{0.3, 0.3, 1.282, -0.882};
    CHECK(select_case(w, p).status == EvalStatus::Unbounded);
    // The oracle iteration drifts toward zero instead of converging.
    const FixedPointReport fp = fixed_point_f(w, p, 1e-12, 200'000);
    CHECK_FALSE(fp.converged);
    CHECK(fp.f < 1e-6);
  }

  TEST_CASE("appendix liquidity form also agrees with the oracle") {
    const Household hh = test::average_household();
    ModelParams params = ModelParams::baseline();
    params.liquidity_form = LiquidityForm::AppendixForm;
    const PeriodParams p = to_per_period(params, hh.labor_ratio());
    std::size_t checked = 0;
    for (const auto& w : test::random_grid_points(hh, 40, 23)) {
      const Evaluation ev = select_case(w, p);
      if (ev.status != EvalStatus::Ok) continue;
      CHECK(test::rel_diff(ev.value, fixed_point_f(w, p).f) < 1e-6);
      if (++checked == 5) break;
    }
    CHECK(checked == 5);
  }
}
