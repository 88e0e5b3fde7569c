#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "housefolio/feasibility.hpp"
#include "housefolio/model.hpp"
#include "housefolio/valuefn.hpp"

namespace housefolio {

enum class SolveStatus {
  Optimal,
  Infeasible,        ///< banking constraints leave no admissible mortgage share
  AllPointsInvalid,  ///< every grid point was bankrupt or unbounded
};

const char* status_name(SolveStatus s);

/// Absolute tolerance under which two values of f count as tied.
inline constexpr double kValueTieTolerance = 1e-14;

/// Total preference order over evaluated grid points: larger f, then (on a
/// tie) smaller |alphaM|, larger alpha2, larger alpha1.
bool preferred(double f_a, const PortfolioWeights& a, double f_b, const PortfolioWeights& b);

struct Solution {
  std::string household_id;
  int imputation = 1;
  SolveStatus status = SolveStatus::Optimal;
  PortfolioWeights weights{};
  double value = 0.0;  ///< f at the optimum
  CaseId case_id = CaseId::F2;
  ConsumptionSchedule consumption{};

  std::optional<FeasibleRegion> region;
  std::size_t grid_size = 0;
  std::size_t bankrupt_points = 0;
  std::size_t unbounded_points = 0;
  std::size_t failed_points = 0;       ///< no consistent case; skipped
  std::size_t tolerant_matches = 0;    ///< case accepted only within the tie tolerance
  std::size_t nonmonotone_points = 0;  ///< binding pattern not ordered by state returns
  std::array<std::size_t, 8> case_counts{};  ///< indexed by CaseId - 1

  bool ok() const { return status == SolveStatus::Optimal; }
  std::size_t resolved_points() const;
};

/// Evaluates every point of `grid` and keeps the preferred one. The
/// household fields of the result are left empty.
Solution scan_grid(std::span<const PortfolioWeights> grid, const PeriodParams& period);

/// Grid search for the f-maximizing portfolio of one household.
Solution solve_household(const Household& hh, const ModelParams& params, const GridSteps& steps = {});

/// Solves each household independently; output order matches input order and
/// does not depend on `threads` (0 = all cores).
std::vector<Solution> solve_population(std::span<const Household> households, const ModelParams& params,
                                       const GridSteps& steps = {}, unsigned threads = 0);

}  // namespace housefolio
