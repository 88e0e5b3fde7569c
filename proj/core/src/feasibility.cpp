#include "housefolio/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace housefolio {

double FeasibleRegion::liquid_budget(double mortgage) const {
  return std::max(0.0, 1.0 - housing_ratio - mortgage);
}

bool FeasibleRegion::contains(const PortfolioWeights& w, double tol) const {
  if (!w.is_valid(tol)) return false;
  if (w.housing != housing_ratio) return false;
  if (w.mortgage < -ltv_cap * housing_ratio - tol) return false;
  if (mortgage_rate > 0.0 && mortgage_rate * -w.mortgage > max_interest_share + tol) return false;
  return true;
}

std::optional<FeasibleRegion> feasible_region(const Household& hh, const BankingPolicy& policy,
                                              const MarketParams& market) {
  hh.validate();
  policy.validate();

  FeasibleRegion r;
  r.housing_ratio = hh.housing_ratio();
  r.ltv_cap = policy.ltv_cap;
  r.mortgage_rate = market.mortgage_rate;
  r.max_interest_share = policy.pti_cap * hh.income_ratio();

  const double ltv_bound = -policy.ltv_cap * r.housing_ratio;
  const double pti_bound = market.mortgage_rate > 0.0 ? -r.max_interest_share / market.mortgage_rate
                                                      : -std::numeric_limits<double>::infinity();
  r.mortgage_lo = std::max(ltv_bound, pti_bound);
  r.mortgage_hi = std::min(0.0, 1.0 - r.housing_ratio);
  if (r.mortgage_lo > r.mortgage_hi) return std::nullopt;
  return r;
}

std::vector<double> axis_points(double lo, double hi, double step) {
  if (!(step > 0.0)) throw InvalidArgument(fmt::format("grid step must be positive, got {}", step));
  if (lo > hi) throw InvalidArgument("empty grid interval");
  std::vector<double> pts;
  // Interior points closer than this to `lo` collapse onto it.
  const double snap = 1e-9 * step;
  for (std::size_t k = 0;; ++k) {
    const double x = hi - static_cast<double>(k) * step;
    if (x <= lo + snap) break;
    pts.push_back(x);
  }
  pts.push_back(lo);
  return pts;
}

std::vector<PortfolioWeights> generate_grid(const FeasibleRegion& region, const GridSteps& steps) {
  if (!(steps.mortgage > 0.0) || !(steps.stocks > 0.0)) {
    throw InvalidArgument("grid steps must be positive");
  }
  if (region.mortgage_lo > region.mortgage_hi) throw InvalidArgument("empty feasible region");

  std::vector<PortfolioWeights> grid;
  for (double m : axis_points(region.mortgage_lo, region.mortgage_hi, steps.mortgage)) {
    const double budget = region.liquid_budget(m);
    const double snap = 1e-9 * steps.stocks;
    for (std::size_t k = 0;; ++k) {
      double a1 = static_cast<double>(k) * steps.stocks;
      const bool last = a1 >= budget - snap;
      if (last) a1 = budget;
      PortfolioWeights w;
      w.stocks = a1;
      w.deposits = budget - a1;
      w.housing = region.housing_ratio;
      w.mortgage = m;
      grid.push_back(w);
      if (last) break;
    }
  }
  return grid;
}

}  // namespace housefolio
