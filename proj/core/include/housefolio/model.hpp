#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace housefolio {

/// Raised when a parameter set or record violates a type invariant.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stock-index states of nature. The ordering (H, M, L) follows the
/// probabilities lambda1 = P(H), lambda2 = P(M).
enum class State : std::size_t { High = 0, Mid = 1, Low = 2 };

inline constexpr std::size_t kNumStates = 3;
inline constexpr std::array<State, kNumStates> kStates{State::High, State::Mid, State::Low};

const char* state_name(State s);

/// Per-state array indexed by State.
template <typename T>
struct PerState {
  std::array<T, kNumStates> v{};

  constexpr T& operator[](State s) { return v[static_cast<std::size_t>(s)]; }
  constexpr const T& operator[](State s) const { return v[static_cast<std::size_t>(s)]; }
  constexpr T& operator[](std::size_t i) { return v[i]; }
  constexpr const T& operator[](std::size_t i) const { return v[i]; }
};

/// Annualized preference parameters.
struct Preferences {
  double beta = 0.95;        ///< subjective discount factor per year
  double theta = 2.0;        ///< relative risk aversion, strictly above 1
  double gamma = 1.18;       ///< liquidity-shock utility scale
  double mu = 0.25;          ///< annual liquidity-shock probability
  double dt = 1.0 / 12.0;    ///< period length in years

  void validate() const;
};

/// Annual net real returns and the stock scenario distribution.
struct MarketParams {
  double stock_low = -0.1387;
  double stock_mid = 0.1686;
  double stock_high = 0.3777;
  double lambda_high = 0.25;  ///< lambda1
  double lambda_mid = 0.50;   ///< lambda2
  double deposit_return = 0.0115;
  double mortgage_rate = 0.0453;
  double housing_return = 0.0366;
  double fee = 0.05;  ///< early-cancellation fee on deposits, fraction of principal

  double lambda_low() const { return 1.0 - lambda_high - lambda_mid; }
  void validate() const;
};

/// Mortgage-granting rules: loan-to-value and payment-to-income caps.
struct BankingPolicy {
  double ltv_cap = 0.80;
  double pti_cap = 0.33;

  void validate() const;
};

/// How the deposit's forgone interest enters liquid wealth.
///
/// `WithForgoneInterest` subtracts alpha2*r2 from the liquid resources (the
/// form of the budget restriction); `AppendixForm` omits it. Both variants
/// define liquid wealth and retained wealth consistently.
enum class LiquidityForm { WithForgoneInterest, AppendixForm };

struct ModelParams {
  Preferences prefs;
  MarketParams market;
  BankingPolicy policy;
  LiquidityForm liquidity_form = LiquidityForm::WithForgoneInterest;

  /// Calibration used throughout: beta=0.95, theta=2, dt=1/12, gamma=1.18,
  /// mu=0.25, fee=5%, LTV 80%, PTI 33%, historical real returns 1991-2002.
  static ModelParams baseline() { return {}; }
  void validate() const;
};

/// Fractions of net wealth: stocks, deposits, housing, mortgage (<= 0).
struct PortfolioWeights {
  double stocks = 0.0;
  double deposits = 0.0;
  double housing = 0.0;
  double mortgage = 0.0;

  double sum() const { return stocks + deposits + housing + mortgage; }
  /// Budget identity and sign restrictions, with `tol` slack on the sum.
  bool is_valid(double tol = 1e-12) const;

  friend bool operator==(const PortfolioWeights&, const PortfolioWeights&) = default;
};

/// Actual holdings in currency units. Mortgage is stored as a negative amount.
struct Holdings {
  double stocks = 0.0;
  double deposits = 0.0;
  double mortgage = 0.0;

  friend bool operator==(const Holdings&, const Holdings&) = default;
};

/// One survey record (one household under one imputation).
struct Household {
  std::string id;
  int imputation = 1;
  double survey_weight = 1.0;
  double net_wealth = 0.0;     ///< W
  double labor_income = 0.0;   ///< L, per year
  double total_income = 0.0;   ///< Y, per year
  double housing_value = 0.0;  ///< H
  std::optional<Holdings> holdings;
  std::optional<int> purchase_year;
  std::optional<double> desired_housing;
  std::map<std::string, std::string> labels;

  /// alpha3 = H/W.
  double housing_ratio() const;
  /// L/W (annual).
  double labor_ratio() const;
  /// Y/W (annual).
  double income_ratio() const;
  /// Actual portfolio as fractions of W, when holdings are recorded.
  std::optional<PortfolioWeights> actual_weights() const;
  void validate() const;

  friend bool operator==(const Household&, const Household&) = default;
};

/// Currency ratios are rounded to a 2^-40 lattice so that rescaling every
/// currency field by a common factor reproduces the same ratios bit for bit.
double canonical_ratio(double numerator, double denominator);

/// Per-period (length dt) quantities entering the value-function algebra.
struct PeriodParams {
  double beta = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  double dt = 0.0;
  double labor_ratio = 0.0;  ///< (L/W)*dt
  PerState<double> stock_return{};
  PerState<double> prob{};
  double deposit_return = 0.0;
  double mortgage_rate = 0.0;
  double housing_return = 0.0;
  double fee = 0.0;
  LiquidityForm liquidity_form = LiquidityForm::WithForgoneInterest;
};

/// Converts annual calibration to per-period quantities: geometric compounding
/// for beta and returns, complement compounding for mu, linear for labor income.
PeriodParams to_per_period(const Preferences& prefs, const MarketParams& market, double labor_ratio,
                           LiquidityForm form = LiquidityForm::WithForgoneInterest);
PeriodParams to_per_period(const ModelParams& params, double labor_ratio);

struct Scenarios {
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;
  double lambda_high = 0.0;
  double lambda_mid = 0.0;
};

/// Linear interpolation between order statistics (positions p*(n-1)).
double percentile(std::span<const double> values, double pct);

/// Three-state stock scenarios from an annual return series: the low and high
/// percentiles, and the mean of observations strictly inside the band.
Scenarios build_scenarios(std::span<const double> annual_returns, double low_pct, double high_pct);

/// Copies a scenario set into the market's stock returns and probabilities.
void apply_scenarios(MarketParams& market, const Scenarios& s);

}  // namespace housefolio
