#include "housefolio/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <fmt/format.h>

namespace housefolio {

namespace {

constexpr double kOnePercent = 0.01;
constexpr double kFivePercent = 0.05;

void require_aligned(std::span<const Solution> solutions, std::span<const Household> households) {
  if (solutions.size() != households.size()) {
    throw InvalidArgument(fmt::format("{} solutions for {} households", solutions.size(), households.size()));
  }
}

/// Accumulates one (group, imputation) cell.
struct Cell {
  std::vector<double> weights;
  std::array<std::vector<double>, 4> optimal;
  std::array<std::vector<double>, 4> actual;
};

double weighted_mean(const std::vector<double>& w, const std::vector<double>& x, double total) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
  return s / total;
}

/// n/(n-1) * sum w^2 (x - mean)^2 / (sum w)^2.
double weighted_mean_variance(const std::vector<double>& w, const std::vector<double>& x, double total) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double mean = weighted_mean(w, x, total);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * w[i] * (x[i] - mean) * (x[i] - mean);
  return s / (total * total) * static_cast<double>(n) / static_cast<double>(n - 1);
}

}  // namespace

const char* asset_name(Asset a) {
  switch (a) {
    case Asset::Stocks: return "stocks";
    case Asset::Deposits: return "deposits";
    case Asset::Mortgage: return "mortgage";
    case Asset::Housing: return "housing";
  }
  return "?";
}

double share(const PortfolioWeights& w, Asset a) {
  switch (a) {
    case Asset::Stocks: return w.stocks;
    case Asset::Deposits: return w.deposits;
    case Asset::Mortgage: return w.mortgage;
    case Asset::Housing: return w.housing;
  }
  return 0.0;
}

std::string group_of(const Household& hh, const std::string& group_column) {
  if (group_column == "all") return "all";
  const auto it = hh.labels.find(group_column);
  return it == hh.labels.end() ? "(missing)" : it->second;
}

GroupMeansResult weighted_group_means(std::span<const Solution> solutions, std::span<const Household> households,
                                      const std::string& group_column) {
  require_aligned(solutions, households);
  GroupMeansResult result;
  std::map<std::pair<std::string, int>, Cell> cells;
  for (std::size_t i = 0; i < households.size(); ++i) {
    const Household& hh = households[i];
    const auto actual = hh.actual_weights();
    if (!solutions[i].ok() || !actual) {
      ++result.excluded;
      continue;
    }
    Cell& cell = cells[{group_of(hh, group_column), hh.imputation}];
    cell.weights.push_back(hh.survey_weight);
    for (Asset a : kAssets) {
      const auto k = static_cast<std::size_t>(a);
      cell.optimal[k].push_back(share(solutions[i].weights, a));
      cell.actual[k].push_back(share(*actual, a));
    }
  }

  for (const auto& [key, cell] : cells) {
    const double total = std::accumulate(cell.weights.begin(), cell.weights.end(), 0.0);
    if (!(total > 0.0)) {
      result.warnings.push_back(
          fmt::format("group '{}' imputation {} has zero total weight; omitted", key.first, key.second));
      continue;
    }
    GroupMeans g;
    g.group = key.first;
    g.imputation = key.second;
    g.households = cell.weights.size();
    g.total_weight = total;
    for (std::size_t k = 0; k < 4; ++k) {
      g.optimal[k] = weighted_mean(cell.weights, cell.optimal[k], total);
      g.actual[k] = weighted_mean(cell.weights, cell.actual[k], total);
      std::vector<double> dev(cell.weights.size());
      for (std::size_t j = 0; j < dev.size(); ++j) dev[j] = cell.optimal[k][j] - cell.actual[k][j];
      g.deviation_variance[k] = weighted_mean_variance(cell.weights, dev, total);
    }
    result.groups.push_back(std::move(g));
  }
  return result;
}

CombinedEstimate combine_imputations(std::span<const double> estimates, std::span<const double> variances) {
  if (estimates.empty()) throw InvalidArgument("combine_imputations needs at least one estimate");
  if (estimates.size() != variances.size()) throw InvalidArgument("estimates and variances differ in length");
  const double m = static_cast<double>(estimates.size());
  CombinedEstimate c;
  c.point = std::accumulate(estimates.begin(), estimates.end(), 0.0) / m;
  c.within = std::accumulate(variances.begin(), variances.end(), 0.0) / m;
  if (estimates.size() > 1) {
    double ss = 0.0;
    for (double e : estimates) ss += (e - c.point) * (e - c.point);
    c.between = ss / (m - 1.0);
  }
  c.total = c.within + (m + 1.0) * c.between / m;
  return c;
}

const char* significance_marker(Significance s) {
  switch (s) {
    case Significance::None: return "";
    case Significance::FivePercent: return "*";
    case Significance::OnePercent: return "**";
  }
  return "";
}

DeviationFlag deviation_flags(double optimal_mean, double actual_mean, double total_variance) {
  if (!(total_variance >= 0.0)) throw InvalidArgument("total variance must be nonnegative");
  DeviationFlag flag;
  const double dev = optimal_mean - actual_mean;
  if (dev == 0.0) return flag;
  if (total_variance == 0.0) {
    flag.level = Significance::OnePercent;
    flag.z = std::copysign(HUGE_VAL, dev);
    flag.p_value = 0.0;
    flag.degenerate = true;
    return flag;
  }
  flag.z = dev / std::sqrt(total_variance);
  flag.p_value = std::erfc(std::abs(flag.z) / std::sqrt(2.0));
  if (flag.p_value < kOnePercent) {
    flag.level = Significance::OnePercent;
  } else if (flag.p_value < kFivePercent) {
    flag.level = Significance::FivePercent;
  }
  return flag;
}

GroupReportResult group_reports(std::span<const Solution> solutions, std::span<const Household> households,
                                const std::string& group_column) {
  GroupMeansResult means = weighted_group_means(solutions, households, group_column);
  GroupReportResult result;
  result.warnings = std::move(means.warnings);
  result.excluded = means.excluded;

  std::map<std::string, std::vector<const GroupMeans*>> by_group;
  for (const GroupMeans& g : means.groups) by_group[g.group].push_back(&g);

  for (const auto& [label, cells] : by_group) {
    GroupReport r;
    r.group = label;
    r.imputations = static_cast<int>(cells.size());
    for (const GroupMeans* g : cells) r.households += g->households;
    for (std::size_t k = 0; k < 4; ++k) {
      std::vector<double> opt;
      std::vector<double> act;
      std::vector<double> dev;
      std::vector<double> var;
      for (const GroupMeans* g : cells) {
        opt.push_back(g->optimal[k]);
        act.push_back(g->actual[k]);
        dev.push_back(g->optimal[k] - g->actual[k]);
        var.push_back(g->deviation_variance[k]);
      }
      const std::vector<double> zeros(cells.size(), 0.0);
      AssetComparison& a = r.assets[k];
      a.optimal = combine_imputations(opt, zeros).point;
      a.actual = combine_imputations(act, zeros).point;
      const CombinedEstimate d = combine_imputations(dev, var);
      a.deviation = d.point;
      a.total_variance = d.total;
      a.flag = deviation_flags(a.deviation, 0.0, a.total_variance);
    }
    result.groups.push_back(std::move(r));
  }
  return result;
}

ModelParams apply_sweep_value(const ModelParams& base, const std::string& axis, const std::string& value,
                              const ConfigFile& config) {
  ModelParams p = base;
  if (axis == "beta" || axis == "gamma" || axis == "mu" || axis == "dt" || axis == "ltv_cap" || axis == "pti_cap") {
    if (!set_model_param(p, axis, value)) throw InvalidArgument(fmt::format("unknown sweep axis '{}'", axis));
  } else if (axis == "scenario_percentiles") {
    const auto colon = value.find(':');
    if (colon == std::string::npos) {
      throw InvalidArgument(fmt::format("scenario_percentiles value '{}' must be 'low:high'", value));
    }
    const auto series = config.get_list("stock_series");
    if (!series) throw InvalidArgument("scenario_percentiles sweep needs 'stock_series' in the configuration");
    const double lo = parse_number(value.substr(0, colon));
    const double hi = parse_number(value.substr(colon + 1));
    apply_scenarios(p.market, build_scenarios(*series, lo, hi));
  } else if (axis == "stock_index_series") {
    if (value != "baseline") {
      const auto s = named_scenarios(config, value);
      if (!s) throw InvalidArgument(fmt::format("no scenarios named '{}' in the configuration", value));
      apply_scenarios(p.market, *s);
    }
  } else {
    throw InvalidArgument(fmt::format("unknown sweep axis '{}'", axis));
  }
  p.validate();
  return p;
}

SweepRow summarize(std::span<const Solution> solutions, std::span<const Household> households) {
  require_aligned(solutions, households);
  SweepRow row;
  std::map<int, std::pair<double, AssetArray>> per_imputation;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const Solution& s = solutions[i];
    if (s.status == SolveStatus::Infeasible) {
      ++row.infeasible;
      continue;
    }
    if (s.status == SolveStatus::AllPointsInvalid) {
      ++row.invalid;
      continue;
    }
    ++row.solved;
    auto& [weight, sums] = per_imputation[households[i].imputation];
    const double w = households[i].survey_weight;
    weight += w;
    for (Asset a : kAssets) sums[static_cast<std::size_t>(a)] += w * share(s.weights, a);
  }
  std::size_t used = 0;
  for (const auto& [imp, cell] : per_imputation) {
    if (!(cell.first > 0.0)) continue;
    ++used;
    for (std::size_t k = 0; k < 4; ++k) row.mean_optimal[k] += cell.second[k] / cell.first;
  }
  if (used > 0) {
    for (double& m : row.mean_optimal) m /= static_cast<double>(used);
  }
  return row;
}

std::vector<SweepRow> sweep(std::span<const Household> households, const ModelParams& base, const std::string& axis,
                            std::span<const std::string> values, const ConfigFile& config, const GridSteps& steps,
                            unsigned threads) {
  if (std::find(kSweepAxes.begin(), kSweepAxes.end(), axis) == kSweepAxes.end()) {
    throw InvalidArgument(fmt::format("unknown sweep axis '{}'", axis));
  }
  std::vector<SweepRow> rows;
  for (const std::string& value : values) {
    const ModelParams p = apply_sweep_value(base, axis, value, config);
    const auto solutions = solve_population(households, p, steps, threads);
    SweepRow row = summarize(solutions, households);
    row.axis = axis;
    row.value = value;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace housefolio
