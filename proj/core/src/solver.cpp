#include "housefolio/solver.hpp"

#include <cmath>
#include <numeric>

#include "housefolio/parallel.hpp"

namespace housefolio {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::AllPointsInvalid: return "all_points_invalid";
  }
  return "?";
}

bool preferred(double f_a, const PortfolioWeights& a, double f_b, const PortfolioWeights& b) {
  if (std::abs(f_a - f_b) > kValueTieTolerance) return f_a > f_b;
  if (a.mortgage != b.mortgage) return a.mortgage > b.mortgage;
  if (a.deposits != b.deposits) return a.deposits > b.deposits;
  if (a.stocks != b.stocks) return a.stocks > b.stocks;
  return false;
}

std::size_t Solution::resolved_points() const {
  return std::accumulate(case_counts.begin(), case_counts.end(), std::size_t{0});
}

Solution scan_grid(std::span<const PortfolioWeights> grid, const PeriodParams& period) {
  Solution sol;
  sol.grid_size = grid.size();
  bool found = false;
  for (const PortfolioWeights& w : grid) {
    Evaluation ev;
    try {
      ev = select_case(w, period);
    } catch (const NoConsistentCase&) {
      ++sol.failed_points;
      continue;
    }
    if (ev.status == EvalStatus::LiquidityBankrupt) {
      ++sol.bankrupt_points;
      continue;
    }
    if (ev.status == EvalStatus::Unbounded) {
      ++sol.unbounded_points;
      continue;
    }
    ++sol.case_counts[static_cast<std::size_t>(ev.case_id) - 1];
    if (ev.tolerant_match) ++sol.tolerant_matches;
    if (!binding_pattern_monotone(ev.case_id)) ++sol.nonmonotone_points;
    if (!found || preferred(ev.value, w, sol.value, sol.weights)) {
      found = true;
      sol.value = ev.value;
      sol.weights = w;
      sol.case_id = ev.case_id;
      sol.consumption = ev.consumption;
    }
  }
  sol.status = found ? SolveStatus::Optimal : SolveStatus::AllPointsInvalid;
  return sol;
}

Solution solve_household(const Household& hh, const ModelParams& params, const GridSteps& steps) {
  params.validate();
  Solution sol;
  const auto region = feasible_region(hh, params.policy, params.market);
  if (!region) {
    sol.status = SolveStatus::Infeasible;
  } else {
    const PeriodParams period = to_per_period(params, hh.labor_ratio());
    const auto grid = generate_grid(*region, steps);
    sol = scan_grid(grid, period);
    sol.region = region;
  }
  sol.household_id = hh.id;
  sol.imputation = hh.imputation;
  return sol;
}

std::vector<Solution> solve_population(std::span<const Household> households, const ModelParams& params,
                                       const GridSteps& steps, unsigned threads) {
  std::vector<Solution> out(households.size());
  parallel_for(households.size(), threads,
               [&](std::size_t i) { out[i] = solve_household(households[i], params, steps); });
  return out;
}

}  // namespace housefolio
