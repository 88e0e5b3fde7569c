#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "housefolio/feasibility.hpp"
#include "housefolio/model.hpp"

namespace housefolio::test {

/// Survey-average record: W, L, Y, H from the sample means.
inline Household average_household() {
  Household hh;
  hh.id = "avg";
  hh.net_wealth = 159'542.0;
  hh.labor_income = 32'208.0;
  hh.total_income = 38'693.0;
  hh.housing_value = 204'552.0;
  return hh;
}

inline Household make_household(const std::string& id, double w, double l, double y, double h) {
  Household hh;
  hh.id = id;
  hh.net_wealth = w;
  hh.labor_income = l;
  hh.total_income = y;
  hh.housing_value = h;
  return hh;
}

inline PeriodParams baseline_period(double labor_ratio) {
  return to_per_period(ModelParams::baseline(), labor_ratio);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// `count` distinct points drawn from the household's baseline grid.
inline std::vector<PortfolioWeights> random_grid_points(const Household& hh, std::size_t count, std::uint64_t seed,
                                                        const ModelParams& params = ModelParams::baseline()) {
  const auto region = feasible_region(hh, params.policy, params.market);
  const auto grid = generate_grid(*region, GridSteps{});
  std::mt19937_64 rng(seed);
  std::vector<PortfolioWeights> out;
  std::vector<bool> used(grid.size(), false);
  while (out.size() < count && out.size() < grid.size()) {
    const std::size_t i = static_cast<std::size_t>(rng() % grid.size());
    if (used[i]) continue;
    used[i] = true;
    out.push_back(grid[i]);
  }
  return out;
}

}  // namespace housefolio::test
