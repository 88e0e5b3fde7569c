#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "housefolio/model.hpp"

namespace housefolio {

// Independent checks of the case-selected value f. Nothing here touches the
// value-function case algebra: consumption is chosen by direct numerical
// maximization of the normalized Bellman right-hand side.

struct FixedPointReport {
  double f = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double last_gap = 0.0;
  /// Successive gaps never grew after the burn-in iterations.
  bool monotone_gaps = true;
};

/// Iterates f -> T(f), where T substitutes V = f^-theta W^(1-theta)/(1-theta)
/// into the fixed-weight Bellman equation. Shock regimes consume all liquid
/// wealth; normal regimes pick consumption in (0, lw] by golden-section search.
/// Converged means the last gap and its geometric tail estimate are both <= tol.
FixedPointReport fixed_point_f(const PortfolioWeights& w, const PeriodParams& p, double tol = 1e-12,
                               std::size_t max_iter = 2'000'000);

/// Normal-regime consumption per unit wealth that maximizes flow utility plus
/// continuation value under continuation f, by state.
PerState<double> normal_consumption(const PortfolioWeights& w, const PeriodParams& p, double f);

struct SimulationOptions {
  std::size_t horizon = 600;    ///< periods per path
  std::size_t paths = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;         ///< 0 = all cores; never changes the result
  /// Close each path with the homogeneous continuation value at the horizon.
  bool terminal_value = true;
};

struct SimulationReport {
  double f = 0.0;
  double f_std_error = 0.0;
  double value = 0.0;            ///< mean discounted utility at W = 1
  double value_std_error = 0.0;
  double terminal_share = 0.0;   ///< share of `value` contributed by the terminal term
  std::size_t paths = 0;
  std::size_t aborted = 0;       ///< paths whose wealth reached <= 0
  bool valid = false;            ///< aborted paths <= 1%
};

/// Monte Carlo evaluation of the fixed-weight policy whose normal-regime
/// consumption is optimal under continuation `policy_f`. Labor income is
/// proportional to wealth. Each path draws from its own mt19937_64 stream
/// seeded from (seed, path index); sums use a pairwise tree, so results are
/// bit-identical for any thread count.
SimulationReport simulate_policy(const PortfolioWeights& w, const PeriodParams& p, double policy_f,
                                 const SimulationOptions& opts = {});

struct OracleReport {
  FixedPointReport fixed_point;
  std::optional<SimulationReport> simulation;
};

/// Pairwise (tree) summation with a fixed split order.
double pairwise_sum(std::span<const double> values);

}  // namespace housefolio
