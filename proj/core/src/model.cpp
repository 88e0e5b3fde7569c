#include "housefolio/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace housefolio {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

bool finite(double x) { return std::isfinite(x); }

double per_period_return(double annual, double dt) { return std::pow(1.0 + annual, dt) - 1.0; }

}  // namespace

const char* state_name(State s) {
  switch (s) {
    case State::High: return "H";
    case State::Mid: return "M";
    case State::Low: return "L";
  }
  return "?";
}

void Preferences::validate() const {
  require(finite(beta) && beta > 0.0 && beta < 1.0, fmt::format("beta must lie in (0,1), got {}", beta));
  require(finite(theta) && theta > 1.0, fmt::format("theta must exceed 1, got {}", theta));
  require(finite(gamma) && gamma >= 1.0, fmt::format("gamma must be >= 1, got {}", gamma));
  require(finite(mu) && mu >= 0.0 && mu <= 1.0, fmt::format("mu must lie in [0,1], got {}", mu));
  require(finite(dt) && dt > 0.0 && dt <= 1.0, fmt::format("dt must lie in (0,1], got {}", dt));
}

void MarketParams::validate() const {
  require(finite(stock_low) && finite(stock_mid) && finite(stock_high), "stock returns must be finite");
  require(stock_low <= stock_mid && stock_mid <= stock_high,
          fmt::format("stock returns must satisfy low <= mid <= high, got ({}, {}, {})", stock_low,
                      stock_mid, stock_high));
  require(lambda_high >= 0.0 && lambda_mid >= 0.0 && lambda_high + lambda_mid <= 1.0,
          fmt::format("scenario probabilities invalid: lambda_high={}, lambda_mid={}", lambda_high,
                      lambda_mid));
  require(finite(deposit_return) && finite(mortgage_rate) && finite(housing_return),
          "asset returns must be finite");
  require(stock_low > -1.0 && deposit_return > -1.0 && mortgage_rate > -1.0 && housing_return > -1.0,
          "gross returns must be positive");
  require(fee >= 0.0 && fee < 1.0, fmt::format("fee must lie in [0,1), got {}", fee));
}

void BankingPolicy::validate() const {
  require(ltv_cap > 0.0 && ltv_cap <= 1.0, fmt::format("ltv_cap must lie in (0,1], got {}", ltv_cap));
  require(pti_cap > 0.0 && pti_cap <= 1.0, fmt::format("pti_cap must lie in (0,1], got {}", pti_cap));
}

void ModelParams::validate() const {
  prefs.validate();
  market.validate();
  policy.validate();
}

bool PortfolioWeights::is_valid(double tol) const {
  return std::abs(sum() - 1.0) <= tol && stocks >= 0.0 && deposits >= 0.0 && housing >= 0.0 &&
         mortgage <= 0.0;
}

double canonical_ratio(double numerator, double denominator) {
  constexpr double kScale = 1099511627776.0;  // 2^40
  return std::nearbyint(numerator / denominator * kScale) / kScale;
}

double Household::housing_ratio() const { return canonical_ratio(housing_value, net_wealth); }
double Household::labor_ratio() const { return canonical_ratio(labor_income, net_wealth); }
double Household::income_ratio() const { return canonical_ratio(total_income, net_wealth); }

std::optional<PortfolioWeights> Household::actual_weights() const {
  if (!holdings) return std::nullopt;
  PortfolioWeights w;
  w.stocks = canonical_ratio(holdings->stocks, net_wealth);
  w.deposits = canonical_ratio(holdings->deposits, net_wealth);
  w.housing = housing_ratio();
  w.mortgage = canonical_ratio(holdings->mortgage, net_wealth);
  return w;
}

void Household::validate() const {
  require(!id.empty(), "household id is empty");
  require(imputation >= 1, fmt::format("imputation index must be >= 1, got {}", imputation));
  require(finite(survey_weight) && survey_weight >= 0.0, "survey_weight must be nonnegative");
  require(finite(net_wealth) && net_wealth > 0.0, fmt::format("net_wealth must be positive, got {}", net_wealth));
  require(finite(housing_value) && housing_value > 0.0,
          fmt::format("housing_value must be positive, got {}", housing_value));
  require(finite(labor_income) && labor_income >= 0.0, "labor_income must be nonnegative");
  require(finite(total_income) && total_income >= 0.0, "total_income must be nonnegative");
  if (holdings) {
    require(holdings->stocks >= 0.0 && holdings->deposits >= 0.0 && holdings->mortgage <= 0.0,
            "holdings violate sign restrictions (stocks, deposits >= 0; mortgage <= 0)");
    // Currency columns carry cents; allow one cent of rounding per column.
    const double total = holdings->stocks + holdings->deposits + housing_value + holdings->mortgage;
    require(std::abs(total - net_wealth) <= 0.04 + 1e-12 * net_wealth,
            fmt::format("holdings sum to {:.2f}, not net_wealth {:.2f}", total, net_wealth));
  }
  if (desired_housing) require(*desired_housing >= 0.0, "desired_housing must be nonnegative");
}

PeriodParams to_per_period(const Preferences& prefs, const MarketParams& market, double labor_ratio,
                           LiquidityForm form) {
  prefs.validate();
  market.validate();
  require(finite(labor_ratio) && labor_ratio >= 0.0, "labor ratio must be nonnegative");

  const double dt = prefs.dt;
  PeriodParams p;
  p.beta = std::pow(prefs.beta, dt);
  p.theta = prefs.theta;
  p.gamma = prefs.gamma;
  p.mu = 1.0 - std::pow(1.0 - prefs.mu, dt);
  p.dt = dt;
  p.labor_ratio = labor_ratio * dt;
  p.stock_return[State::High] = per_period_return(market.stock_high, dt);
  p.stock_return[State::Mid] = per_period_return(market.stock_mid, dt);
  p.stock_return[State::Low] = per_period_return(market.stock_low, dt);
  p.prob[State::High] = market.lambda_high;
  p.prob[State::Mid] = market.lambda_mid;
  p.prob[State::Low] = market.lambda_low();
  p.deposit_return = per_period_return(market.deposit_return, dt);
  p.mortgage_rate = per_period_return(market.mortgage_rate, dt);
  p.housing_return = per_period_return(market.housing_return, dt);
  p.fee = market.fee;
  p.liquidity_form = form;
  return p;
}

PeriodParams to_per_period(const ModelParams& params, double labor_ratio) {
  params.policy.validate();
  return to_per_period(params.prefs, params.market, labor_ratio, params.liquidity_form);
}

double percentile(std::span<const double> values, double pct) {
  require(!values.empty(), "percentile of an empty series");
  require(pct >= 0.0 && pct <= 100.0, fmt::format("percentile must lie in [0,100], got {}", pct));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Scenarios build_scenarios(std::span<const double> annual_returns, double low_pct, double high_pct) {
  require(!annual_returns.empty(), "return series is empty");
  require(low_pct > 0.0 && low_pct < high_pct && high_pct < 100.0,
          fmt::format("percentiles must satisfy 0 < low < high < 100, got ({}, {})", low_pct, high_pct));
  for (double r : annual_returns) require(finite(r) && r > -1.0, "return series must be finite and > -100%");

  Scenarios s;
  s.low = percentile(annual_returns, low_pct);
  s.high = percentile(annual_returns, high_pct);

  double sum = 0.0;
  std::size_t count = 0;
  for (double r : annual_returns) {
    if (r > s.low && r < s.high) {
      sum += r;
      ++count;
    }
  }
  if (count > 0) {
    s.mid = sum / static_cast<double>(count);
  } else if (s.low == s.high) {
    // Degenerate distribution: every band collapses onto the same value.
    s.mid = s.low;
  } else {
    throw InvalidArgument("degenerate percentile band");
  }
  s.lambda_high = 1.0 - high_pct / 100.0;
  s.lambda_mid = (high_pct - low_pct) / 100.0;
  return s;
}

void apply_scenarios(MarketParams& market, const Scenarios& s) {
  market.stock_low = s.low;
  market.stock_mid = s.mid;
  market.stock_high = s.high;
  market.lambda_high = s.lambda_high;
  market.lambda_mid = s.lambda_mid;
}

}  // namespace housefolio
