#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "housefolio/config.hpp"
#include "housefolio/feasibility.hpp"
#include "housefolio/model.hpp"
#include "housefolio/solver.hpp"

namespace housefolio {

enum class Asset : std::size_t { Stocks = 0, Deposits = 1, Mortgage = 2, Housing = 3 };
inline constexpr std::array<Asset, 4> kAssets{Asset::Stocks, Asset::Deposits, Asset::Mortgage, Asset::Housing};
const char* asset_name(Asset a);
double share(const PortfolioWeights& w, Asset a);

using AssetArray = std::array<double, 4>;

/// Survey-weighted means of one group within one imputation.
struct GroupMeans {
  std::string group;
  int imputation = 1;
  std::size_t households = 0;
  double total_weight = 0.0;
  AssetArray optimal{};
  AssetArray actual{};
  /// Sampling variance of the weighted mean of (optimal - actual).
  AssetArray deviation_variance{};
};

struct GroupMeansResult {
  std::vector<GroupMeans> groups;  ///< ordered by (group, imputation)
  std::vector<std::string> warnings;
  std::size_t excluded = 0;  ///< records without an optimal solution or actual holdings
};

/// Group label of a household: the value of `group_column` (or "all" when the
/// column is "all"); households lacking the label fall in "(missing)".
std::string group_of(const Household& hh, const std::string& group_column);

/// Weighted means per (group, imputation). `solutions[i]` belongs to
/// `households[i]`. Groups with zero total weight are omitted with a warning.
GroupMeansResult weighted_group_means(std::span<const Solution> solutions, std::span<const Household> households,
                                      const std::string& group_column);

struct CombinedEstimate {
  double point = 0.0;
  double within = 0.0;   ///< mean within-imputation variance
  double between = 0.0;  ///< sample variance of the estimates (0 for m = 1)
  double total = 0.0;    ///< within + (m+1)/m * between
};

/// Multiple-imputation combination over m = estimates.size() imputations.
CombinedEstimate combine_imputations(std::span<const double> estimates, std::span<const double> variances);

enum class Significance { None, FivePercent, OnePercent };
const char* significance_marker(Significance s);

struct DeviationFlag {
  Significance level = Significance::None;
  double z = 0.0;
  double p_value = 1.0;
  bool degenerate = false;  ///< zero variance with a nonzero deviation
};

/// Two-sided normal test of (optimal - actual) / sqrt(total_variance).
DeviationFlag deviation_flags(double optimal_mean, double actual_mean, double total_variance);

struct AssetComparison {
  double optimal = 0.0;
  double actual = 0.0;
  double deviation = 0.0;
  double total_variance = 0.0;
  DeviationFlag flag;
};

struct GroupReport {
  std::string group;
  std::size_t households = 0;  ///< records over all imputations
  int imputations = 0;
  std::array<AssetComparison, 4> assets{};
};

struct GroupReportResult {
  std::vector<GroupReport> groups;  ///< ordered by group label
  std::vector<std::string> warnings;
  std::size_t excluded = 0;
};

/// Optimal-versus-actual comparison per group, combined over imputations.
GroupReportResult group_reports(std::span<const Solution> solutions, std::span<const Household> households,
                                const std::string& group_column);

inline constexpr std::array<const char*, 8> kSweepAxes{"beta",   "gamma",   "mu", "dt", "ltv_cap",
                                                       "pti_cap", "scenario_percentiles", "stock_index_series"};

struct SweepRow {
  std::string axis;
  std::string value;  ///< as given on input
  std::size_t solved = 0;      ///< records entering the averages
  std::size_t infeasible = 0;  ///< banking constraints leave no admissible mortgage
  std::size_t invalid = 0;     ///< every grid point bankrupt or unbounded
  AssetArray mean_optimal{};   ///< survey-weighted, averaged over imputations
};

/// Parameters for one sweep value on top of `base`. Numeric axes take a
/// number; `scenario_percentiles` takes "low:high" and rebuilds the scenarios
/// from the configured `stock_series`; `stock_index_series` takes a scenario
/// name resolved through `named_scenarios` (or "baseline").
ModelParams apply_sweep_value(const ModelParams& base, const std::string& axis, const std::string& value,
                              const ConfigFile& config);

/// Population-average optimal shares for one parameter set.
SweepRow summarize(std::span<const Solution> solutions, std::span<const Household> households);

/// Re-solves the population for each value of `axis`.
std::vector<SweepRow> sweep(std::span<const Household> households, const ModelParams& base, const std::string& axis,
                            std::span<const std::string> values, const ConfigFile& config = {},
                            const GridSteps& steps = {}, unsigned threads = 0);

}  // namespace housefolio
