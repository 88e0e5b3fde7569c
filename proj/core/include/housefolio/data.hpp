#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "housefolio/config.hpp"
#include "housefolio/model.hpp"

namespace housefolio {

/// Raised for malformed household input; the message names the row.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Net return on housing per square meter: price change after depreciation
/// `delta` and property tax `tau`, plus rent, over the previous price.
double housing_return(double q_prev, double q_now, double rent, double delta, double tau);

struct AmortizationRow {
  int year = 0;
  double payment = 0.0;
  double interest = 0.0;
  double principal = 0.0;  ///< principal repaid this year
  double balance = 0.0;    ///< outstanding after the payment
};

struct AmortizationSchedule {
  double principal = 0.0;
  double annual_rate = 0.0;  ///< initial rate
  int n_years = 0;
  std::vector<AmortizationRow> rows;
};

/// Constant-payment (French) schedule with annual payments.
AmortizationSchedule amortization(double principal, double annual_rate, int n_years);

/// Variable-rate schedule: the annuity is recomputed over the remaining term
/// whenever the rate resets. `rates[y]` applies in year y + 1; the last rate
/// is carried forward if fewer than `n_years` rates are given.
AmortizationSchedule amortization_variable(double principal, std::span<const double> rates, int n_years);

/// Annuity payment principal*r/(1-(1+r)^-n), principal/n when r = 0.
double annuity_payment(double principal, double annual_rate, int n_years);

enum class ConstraintLabel { Unconstrained, Wealth, Income, Both };
const char* constraint_label_name(ConstraintLabel c);

struct ConstraintClass {
  double wealth_limit = 0.0;  ///< NW / (1 - ltv_cap)
  double income_limit = 0.0;  ///< pti_cap * Y / (ltv_cap * r)
  ConstraintLabel label = ConstraintLabel::Unconstrained;
};

/// Compares a desired housing value with the largest purchase the down
/// payment (wealth) and the payment cap (income) allow.
ConstraintClass classify_constraints(double desired_value, double net_wealth, double income, double mortgage_rate,
                                     const BankingPolicy& policy);

/// Fixed leading CSV columns; any other column is a group label.
inline constexpr std::array<const char*, 12> kHouseholdColumns{
    "id",       "imputation", "survey_weight", "net_wealth",    "labor_income",   "total_income",
    "housing_value", "stocks", "deposits",     "mortgage",      "purchase_year", "desired_housing"};

/// Splits one CSV record on commas, honoring double-quoted fields.
std::vector<std::string> split_csv_record(const std::string& line);
/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& s);

/// Reads households from CSV text. Lines starting with '#' are comments; the
/// first other line is the header. Every record is validated; failures throw
/// DataError naming the 1-based line number.
std::vector<Household> parse_households(std::istream& in, const std::string& source = "<stream>");
std::vector<Household> load_households(const std::filesystem::path& path);

/// Writes the header (fixed columns, then label columns sorted by name) and
/// one row per household. Currency is written with two decimals.
void write_households(std::ostream& out, std::span<const Household> households);
void save_households(const std::filesystem::path& path, std::span<const Household> households,
                     const std::string& comment = {});

struct SynthRanges {
  double net_wealth_min = 20'000.0;
  double net_wealth_max = 1'500'000.0;  ///< drawn log-uniformly
  double housing_ratio_min = 0.3;
  double housing_ratio_max = 2.0;
  double labor_ratio_min = 0.0;
  double labor_ratio_max = 0.6;
  double zero_labor_share = 0.2;      ///< households with no labor income
  double other_income_ratio_max = 0.05;  ///< (Y - L) / W drawn in [0, max]
  double survey_weight_min = 100.0;
  double survey_weight_max = 2'000.0;
  int imputations = 1;
  double imputation_spread = 0.05;  ///< relative perturbation of incomes across imputations

  void validate() const;
};

/// Reads `synth.<field>` keys over the defaults.
SynthRanges synth_ranges_from_config(const ConfigFile& config);

/// Deterministic synthetic population of `n` households times the configured
/// imputations. Every household is feasible under `params`' banking policy
/// and carries holdings, a desired housing value and group labels.
std::vector<Household> synthesize_households(std::size_t n, std::uint64_t seed, const SynthRanges& ranges = {},
                                             const ModelParams& params = ModelParams::baseline());

}  // namespace housefolio
