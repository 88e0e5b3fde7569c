#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "housefolio/oracle.hpp"
#include "housefolio/valuefn.hpp"

using namespace housefolio;

TEST_SUITE("oracle") {
  TEST_CASE("without shocks the fixed point reproduces the closed form") {
    PeriodParams p = test::baseline_period(0.0);
    p.gamma = 1.0;
    p.mu = 0.0;
    for (double m : {-0.3, -0.5, -0.9}) {
      const PortfolioWeights w{0.0, 0.0, 1.0 - m, m};
      REQUIRE(select_case(w, p).case_id == CaseId::F1);
      const FixedPointReport fp = fixed_point_f(w, p);
      REQUIRE(fp.converged);
      CHECK(test::rel_diff(fp.f, f1_closed(w, p)) < 1e-8);
    }
  }

  TEST_CASE("fixed point agrees with case selection at 20 random baseline points") {
    const Household hh = test::average_household();
    const PeriodParams p = test::baseline_period(hh.labor_ratio());
    std::size_t checked = 0;
    for (const auto& w : test::random_grid_points(hh, 200, 77)) {
      const Evaluation ev = select_case(w, p);
      if (ev.status != EvalStatus::Ok) continue;
      const FixedPointReport fp = fixed_point_f(w, p);
      CHECK(fp.converged);
      CHECK(fp.monotone_gaps);
      CHECK(test::rel_diff(ev.value, fp.f) < 1e-5);
      if (++checked == 20) break;
    }
    CHECK(checked == 20);
  }

  TEST_CASE("halving the tolerance moves the fixed point by less than the tolerance") {
    const PeriodParams p = test::baseline_period(0.2);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    for (double tol : {1e-8, 1e-10}) {
      const FixedPointReport a = fixed_point_f(w, p, tol);
      const FixedPointReport b = fixed_point_f(w, p, tol / 2.0);
      REQUIRE(a.converged);
      REQUIRE(b.converged);
      CHECK(std::abs(a.f - b.f) < tol);
      CHECK(b.iterations >= a.iterations);
    }
  }

  TEST_CASE("iteration limit is reported as non-convergence") {
    const PeriodParams p = test::baseline_period(0.2);
    const FixedPointReport fp = fixed_point_f(PortfolioWeights{0.05, 0.05, 1.282, -0.382}, p, 1e-12, 5);
    CHECK_FALSE(fp.converged);
    CHECK(fp.iterations == 5);
  }

  TEST_CASE("normal consumption never exceeds liquid wealth") {
    const PeriodParams p = test::baseline_period(0.2);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    const StateReturns sr = state_returns(w, p);
    for (double f : {1e-4, 1e-2, 1.0}) {
      const auto c = normal_consumption(w, p, f);
      for (State s : kStates) {
        CHECK(c[s] > 0.0);
        CHECK(c[s] <= sr.liquid[s]);
      }
    }
  }

  TEST_CASE("deterministic market simulates to the fixed point") {
    PeriodParams p = test::baseline_period(0.0);
    p.gamma = 1.0;
    p.mu = 0.0;
    for (State s : kStates) p.stock_return[s] = p.stock_return[State::Mid];
    const PortfolioWeights w{0.0, 0.0, 1.5, -0.5};
    const FixedPointReport fp = fixed_point_f(w, p);
    SimulationOptions opts;
    opts.paths = 200;
    const SimulationReport sim = simulate_policy(w, p, fp.f, opts);
    CHECK(sim.valid);
    CHECK(sim.value_std_error <= 1e-12 * std::abs(sim.value));
    CHECK(test::rel_diff(sim.f, fp.f) < 1e-9);
  }

  TEST_CASE("baseline simulation agrees with the fixed point within three standard errors") {
    const Household hh = test::average_household();
    const PeriodParams p = test::baseline_period(hh.labor_ratio());
    const PortfolioWeights w{0.115, 0.06, hh.housing_ratio(), 1.0 - hh.housing_ratio() - 0.175};
    const FixedPointReport fp = fixed_point_f(w, p);
    REQUIRE(fp.converged);
    SimulationOptions opts;
    opts.paths = 100'000;
    opts.horizon = 600;
    const SimulationReport sim = simulate_policy(w, p, fp.f, opts);
    CHECK(sim.valid);
    CHECK(sim.aborted == 0);
    CHECK(std::abs(sim.f - fp.f) <= 3.0 * sim.f_std_error);
  }

  TEST_CASE("simulation is reproducible and thread-count independent") {
    const PeriodParams p = test::baseline_period(0.2);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    const double f = fixed_point_f(w, p).f;
    SimulationOptions opts;
    opts.paths = 3'000;
    opts.horizon = 120;
    opts.seed = 9;
    opts.threads = 1;
    const SimulationReport a = simulate_policy(w, p, f, opts);
    const SimulationReport b = simulate_policy(w, p, f, opts);
    opts.threads = 3;
    const SimulationReport c = simulate_policy(w, p, f, opts);
    CHECK(a.f == b.f);
    CHECK(a.value == b.value);
    CHECK(a.value == c.value);
    CHECK(a.value_std_error == c.value_std_error);
    opts.seed = 10;
    CHECK(simulate_policy(w, p, f, opts).value != a.value);
  }

  TEST_CASE("doubling the horizon moves the estimate by less than one standard error") {
    const PeriodParams p = test::baseline_period(0.2);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    const double f = fixed_point_f(w, p).f;
    SimulationOptions opts;
    opts.paths = 20'000;
    opts.horizon = 600;
    const SimulationReport a = simulate_policy(w, p, f, opts);
    opts.horizon = 1200;
    const SimulationReport b = simulate_policy(w, p, f, opts);
    CHECK(std::abs(a.value - b.value) < a.value_std_error);
  }

  TEST_CASE("pairwise sum is exact on representable data and order-fixed") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    CHECK(pairwise_sum(v) == 499'500.0);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  }

  TEST_CASE("invalid simulation requests are rejected") {
    const PeriodParams p = test::baseline_period(0.2);
    const PortfolioWeights w{0.05, 0.05, 1.282, -0.382};
    SimulationOptions opts;
    opts.paths = 0;
    CHECK_THROWS_AS(simulate_policy(w, p, 0.01, opts), InvalidArgument);
    CHECK_THROWS_AS(simulate_policy(w, p, 0.0, SimulationOptions{}), InvalidArgument);
    CHECK_THROWS_AS(fixed_point_f(PortfolioWeights{0.0, 0.0, 6.0, -5.0}, test::baseline_period(0.0)),
                    InvalidArgument);
  }
}
