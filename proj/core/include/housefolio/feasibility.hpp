#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "housefolio/model.hpp"

namespace housefolio {

/// Feasible portfolio geometry for one household. Housing is fixed at
/// alpha3 = H/W; the mortgage share ranges over [mortgage_lo, mortgage_hi] and
/// the rest, 1 - alpha3 - alphaM, is split between stocks and deposits.
struct FeasibleRegion {
  double housing_ratio = 0.0;
  double mortgage_lo = 0.0;
  double mortgage_hi = 0.0;
  double ltv_cap = 0.0;
  double max_interest_share = 0.0;  ///< pti_cap * Y / W, bound on rM * |alphaM|
  double mortgage_rate = 0.0;       ///< annual

  /// alpha1 + alpha2 available at mortgage share `mortgage`, clamped at 0.
  double liquid_budget(double mortgage) const;
  /// Restrictions ii-iv, ix and x for `w` (sum within `tol`).
  bool contains(const PortfolioWeights& w, double tol = 1e-12) const;
};

/// alphaM bounds: lo = max(-ltv*H/W, -pti*Y/(rM*W)), hi = min(0, 1 - H/W).
/// The payment-to-income cap is read as a bound on annual mortgage interest,
/// rM*|alphaM|*W <= pti*Y. Returns nullopt when lo > hi.
std::optional<FeasibleRegion> feasible_region(const Household& hh, const BankingPolicy& policy,
                                              const MarketParams& market);

struct GridSteps {
  double mortgage = 0.005;
  double stocks = 0.005;
};

/// Points hi, hi - step, ... strictly above lo, then lo itself. Both
/// endpoints are always members; a single point when lo == hi.
std::vector<double> axis_points(double lo, double hi, double step);

/// Cartesian grid: alphaM over the mortgage interval and alpha1 over
/// [0, liquid_budget(alphaM)], with alpha2 closing the budget.
/// Throws InvalidArgument for nonpositive steps or an empty region.
std::vector<PortfolioWeights> generate_grid(const FeasibleRegion& region, const GridSteps& steps);

}  // namespace housefolio
