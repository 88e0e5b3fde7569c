#include "housefolio/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "housefolio/feasibility.hpp"

namespace housefolio {

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& column) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError(fmt::format("column '{}' is not a number: '{}'", column, text));
  }
  return v;
}

int to_int(const std::string& text, const std::string& column) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError(fmt::format("column '{}' is not an integer: '{}'", column, text));
  }
  return v;
}

std::string money(double x) {
  std::string s = fmt::format("{:.2f}", x);
  if (s == "-0.00") s = "0.00";
  return s;
}

double round_cents(double x) { return std::nearbyint(x * 100.0) / 100.0; }

/// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

template <std::size_t N>
const char* pick(std::mt19937_64& rng, const std::array<const char*, N>& options) {
  return options[std::min<std::size_t>(static_cast<std::size_t>(unit(rng) * N), N - 1)];
}

std::string income_band(double y) {
  if (y < 20'000.0) return "<20k";
  if (y < 40'000.0) return "20k-40k";
  if (y < 70'000.0) return "40k-70k";
  return ">=70k";
}

std::string wealth_band(double w) {
  if (w < 60'000.0) return "<60k";
  if (w < 150'000.0) return "60k-150k";
  if (w < 400'000.0) return "150k-400k";
  return ">=400k";
}

}  // namespace

double housing_return(double q_prev, double q_now, double rent, double delta, double tau) {
  if (!(q_prev > 0.0)) throw InvalidArgument("housing_return requires a positive previous price");
  return ((q_now - q_prev) + q_now * (tau - delta) + rent) / q_prev;
}

double annuity_payment(double principal, double annual_rate, int n_years) {
  if (!(principal > 0.0)) throw InvalidArgument("amortization principal must be positive");
  if (n_years < 1) throw InvalidArgument("amortization term must be at least one year");
  if (!(annual_rate >= 0.0)) throw InvalidArgument("amortization rate must be nonnegative");
  if (annual_rate == 0.0) return principal / n_years;
  return principal * annual_rate / (1.0 - std::pow(1.0 + annual_rate, -n_years));
}

AmortizationSchedule amortization_variable(double principal, std::span<const double> rates, int n_years) {
  if (rates.empty()) throw InvalidArgument("amortization needs at least one rate");
  AmortizationSchedule s;
  s.principal = principal;
  s.annual_rate = rates.front();
  s.n_years = n_years;
  annuity_payment(principal, rates.front(), n_years);  // validates the inputs

  double balance = principal;
  double payment = 0.0;
  double rate = -1.0;
  for (int y = 1; y <= n_years; ++y) {
    const double r = rates[std::min<std::size_t>(static_cast<std::size_t>(y - 1), rates.size() - 1)];
    if (!(r >= 0.0)) throw InvalidArgument("amortization rate must be nonnegative");
    if (r != rate) {
      rate = r;
      payment = annuity_payment(balance, rate, n_years - y + 1);
    }
    AmortizationRow row;
    row.year = y;
    row.payment = payment;
    row.interest = balance * rate;
    row.principal = payment - row.interest;
    balance = y == n_years ? 0.0 : balance - row.principal;
    row.balance = balance;
    s.rows.push_back(row);
  }
  return s;
}

AmortizationSchedule amortization(double principal, double annual_rate, int n_years) {
  const double rate[] = {annual_rate};
  return amortization_variable(principal, rate, n_years);
}

const char* constraint_label_name(ConstraintLabel c) {
  switch (c) {
    case ConstraintLabel::Unconstrained: return "unconstrained";
    case ConstraintLabel::Wealth: return "wealth";
    case ConstraintLabel::Income: return "income";
    case ConstraintLabel::Both: return "both";
  }
  return "?";
}

ConstraintClass classify_constraints(double desired_value, double net_wealth, double income, double mortgage_rate,
                                     const BankingPolicy& policy) {
  policy.validate();
  if (!(desired_value >= 0.0 && net_wealth >= 0.0 && income >= 0.0)) {
    throw InvalidArgument("constraint classification needs nonnegative values");
  }
  if (!(mortgage_rate > 0.0)) throw InvalidArgument("constraint classification needs a positive mortgage rate");
  ConstraintClass c;
  c.wealth_limit = policy.ltv_cap < 1.0 ? net_wealth / (1.0 - policy.ltv_cap) : HUGE_VAL;
  c.income_limit = policy.pti_cap * income / (policy.ltv_cap * mortgage_rate);
  const bool wealth = desired_value > c.wealth_limit;
  const bool inc = desired_value > c.income_limit;
  c.label = wealth ? (inc ? ConstraintLabel::Both : ConstraintLabel::Wealth)
                   : (inc ? ConstraintLabel::Income : ConstraintLabel::Unconstrained);
  return c;
}

std::vector<Household> parse_households(std::istream& in, const std::string& source) {
  std::vector<Household> out;
  std::vector<std::string> header;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(fmt::format("{}: line {}: {}", source, line_no, what));
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    try {
      fields = split_csv_record(line);
    } catch (const DataError& e) {
      fail(e.what());
    }
    for (auto& f : fields) f = trim(f);

    if (header.empty()) {
      header = fields;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].empty()) fail("empty column name in header");
        if (!index.emplace(header[i], i).second) fail(fmt::format("duplicate column '{}'", header[i]));
      }
      for (const char* required : {"id", "imputation", "survey_weight", "net_wealth", "labor_income",
                                   "total_income", "housing_value"}) {
        if (!index.count(required)) fail(fmt::format("missing column '{}'", required));
      }
      continue;
    }

    if (fields.size() != header.size()) {
      fail(fmt::format("expected {} fields, found {}", header.size(), fields.size()));
    }
    auto cell = [&](const char* name) -> std::optional<std::string> {
      const auto it = index.find(name);
      if (it == index.end() || fields[it->second].empty()) return std::nullopt;
      return fields[it->second];
    };
    auto required_number = [&](const char* name) {
      const auto v = cell(name);
      if (!v) fail(fmt::format("column '{}' is empty", name));
      return to_double(*v, name);
    };

    try {
      Household hh;
      hh.id = cell("id").value_or("");
      const auto imp = cell("imputation");
      if (!imp) fail("column 'imputation' is empty");
      hh.imputation = to_int(*imp, "imputation");
      hh.survey_weight = required_number("survey_weight");
      hh.net_wealth = required_number("net_wealth");
      hh.labor_income = required_number("labor_income");
      hh.total_income = required_number("total_income");
      hh.housing_value = required_number("housing_value");

      const auto stocks = cell("stocks");
      const auto deposits = cell("deposits");
      const auto mortgage = cell("mortgage");
      const int present = int{stocks.has_value()} + int{deposits.has_value()} + int{mortgage.has_value()};
      if (present == 3) {
        hh.holdings = Holdings{to_double(*stocks, "stocks"), to_double(*deposits, "deposits"),
                               to_double(*mortgage, "mortgage")};
      } else if (present != 0) {
        fail("stocks, deposits and mortgage must be given together");
      }
      if (const auto y = cell("purchase_year")) hh.purchase_year = to_int(*y, "purchase_year");
      if (const auto d = cell("desired_housing")) hh.desired_housing = to_double(*d, "desired_housing");

      for (std::size_t i = 0; i < header.size(); ++i) {
        const bool fixed = std::find_if(kHouseholdColumns.begin(), kHouseholdColumns.end(), [&](const char* c) {
                             return header[i] == c;
                           }) != kHouseholdColumns.end();
        if (!fixed && !fields[i].empty()) hh.labels[header[i]] = fields[i];
      }
      hh.validate();
      out.push_back(std::move(hh));
    } catch (const DataError& e) {
      const std::string what = e.what();
      if (what.rfind(source, 0) == 0) throw;
      fail(what);
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }
  if (header.empty()) throw DataError(fmt::format("{}: missing header row", source));
  return out;
}

std::vector<Household> load_households(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open household file '{}'", path.string()));
  return parse_households(in, path.string());
}

void write_households(std::ostream& out, std::span<const Household> households) {
  std::set<std::string> label_columns;
  for (const Household& hh : households) {
    for (const auto& [k, v] : hh.labels) label_columns.insert(k);
  }
  std::string line;
  for (const char* c : kHouseholdColumns) {
    if (!line.empty()) line += ',';
    line += c;
  }
  for (const std::string& c : label_columns) line += ',' + csv_escape(c);
  out << line << '\n';

  for (const Household& hh : households) {
    line = csv_escape(hh.id);
    line += fmt::format(",{},{},{},{},{},{}", hh.imputation, hh.survey_weight, money(hh.net_wealth),
                        money(hh.labor_income), money(hh.total_income), money(hh.housing_value));
    if (hh.holdings) {
      line += fmt::format(",{},{},{}", money(hh.holdings->stocks), money(hh.holdings->deposits),
                          money(hh.holdings->mortgage));
    } else {
      line += ",,,";
    }
    line += ',';
    if (hh.purchase_year) line += std::to_string(*hh.purchase_year);
    line += ',';
    if (hh.desired_housing) line += money(*hh.desired_housing);
    for (const std::string& c : label_columns) {
      line += ',';
      const auto it = hh.labels.find(c);
      if (it != hh.labels.end()) line += csv_escape(it->second);
    }
    out << line << '\n';
  }
}

void save_households(const std::filesystem::path& path, std::span<const Household> households,
                     const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write household file '{}'", path.string()));
  if (!comment.empty()) out << "# " << comment << '\n';
  write_households(out, households);
  if (!out) throw DataError(fmt::format("error writing household file '{}'", path.string()));
}

void SynthRanges::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(fmt::format("invalid synthesizer ranges: {}", what));
  };
  require(net_wealth_min > 0.0 && net_wealth_min <= net_wealth_max, "net_wealth_min/max");
  require(housing_ratio_min > 0.0 && housing_ratio_min <= housing_ratio_max, "housing_ratio_min/max");
  require(labor_ratio_min >= 0.0 && labor_ratio_min <= labor_ratio_max, "labor_ratio_min/max");
  require(zero_labor_share >= 0.0 && zero_labor_share <= 1.0, "zero_labor_share");
  require(other_income_ratio_max >= 0.0, "other_income_ratio_max");
  require(survey_weight_min >= 0.0 && survey_weight_min <= survey_weight_max, "survey_weight_min/max");
  require(imputations >= 1, "imputations");
  require(imputation_spread >= 0.0 && imputation_spread < 1.0, "imputation_spread");
}

SynthRanges synth_ranges_from_config(const ConfigFile& config) {
  SynthRanges r;
  const std::map<std::string, double*> fields{
      {"net_wealth_min", &r.net_wealth_min},
      {"net_wealth_max", &r.net_wealth_max},
      {"housing_ratio_min", &r.housing_ratio_min},
      {"housing_ratio_max", &r.housing_ratio_max},
      {"labor_ratio_min", &r.labor_ratio_min},
      {"labor_ratio_max", &r.labor_ratio_max},
      {"zero_labor_share", &r.zero_labor_share},
      {"other_income_ratio_max", &r.other_income_ratio_max},
      {"survey_weight_min", &r.survey_weight_min},
      {"survey_weight_max", &r.survey_weight_max},
      {"imputation_spread", &r.imputation_spread},
  };
  for (const std::string& key : config.keys_with_prefix("synth.")) {
    const std::string full = "synth." + key;
    if (key == "imputations") {
      const double v = *config.get_double(full);
      if (v != std::floor(v)) throw ConfigError("synth.imputations must be an integer");
      r.imputations = static_cast<int>(v);
      continue;
    }
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(fmt::format("unknown synthesizer key '{}'", full));
    *it->second = *config.get_double(full);
  }
  r.validate();
  return r;
}

std::vector<Household> synthesize_households(std::size_t n, std::uint64_t seed, const SynthRanges& ranges,
                                             const ModelParams& params) {
  ranges.validate();
  params.validate();
  static constexpr std::array<const char*, 6> kAge{"<35", "35-44", "45-54", "55-64", "65-74", ">=75"};
  static constexpr std::array<const char*, 3> kEducation{"primary", "secondary", "university"};
  static constexpr std::array<const char*, 2> kWorking{"employee", "self-employed"};
  static constexpr std::array<const char*, 2> kSophistication{"low", "high"};
  constexpr int kMaxAttempts = 10'000;

  std::vector<Household> out;
  out.reserve(n * static_cast<std::size_t>(ranges.imputations));
  for (std::size_t i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<Household> group;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) {
        throw InvalidArgument("synthesizer ranges admit no household feasible under the banking policy");
      }
      group.clear();
      const double w = round_cents(
          std::exp(uniform(rng, std::log(ranges.net_wealth_min), std::log(ranges.net_wealth_max))));
      const double h = round_cents(w * uniform(rng, ranges.housing_ratio_min, ranges.housing_ratio_max));
      const bool no_labor = unit(rng) < ranges.zero_labor_share;
      const double labor_ratio = no_labor ? 0.0 : uniform(rng, ranges.labor_ratio_min, ranges.labor_ratio_max);
      const double other_ratio = uniform(rng, 0.0, ranges.other_income_ratio_max);
      const double weight = round_cents(uniform(rng, ranges.survey_weight_min, ranges.survey_weight_max));
      const double mortgage_pos = unit(rng);
      const bool holds_stocks = unit(rng) < 0.4;
      const double stock_frac = unit(rng);
      const double desired_factor = uniform(rng, 0.8, 1.6);

      Household hh;
      hh.id = fmt::format("H{:05d}", i + 1);
      hh.survey_weight = weight;
      hh.net_wealth = w;
      hh.housing_value = h;
      hh.labor_income = round_cents(labor_ratio * w);
      hh.total_income = round_cents(hh.labor_income + other_ratio * w);
      hh.purchase_year = 1960 + static_cast<int>(unit(rng) * 43.0);
      hh.desired_housing = round_cents(h * desired_factor);
      hh.labels["age_band"] = no_labor ? pick(rng, std::array<const char*, 2>{"65-74", ">=75"}) : pick(rng, kAge);
      hh.labels["education"] = pick(rng, kEducation);
      hh.labels["labor_status"] = no_labor ? "retired" : pick(rng, kWorking);
      hh.labels["sophistication"] = pick(rng, kSophistication);

      bool feasible = true;
      for (int m = 1; m <= ranges.imputations && feasible; ++m) {
        Household imp = hh;
        imp.imputation = m;
        if (m > 1) {
          const double scale = 1.0 + ranges.imputation_spread * (2.0 * unit(rng) - 1.0);
          imp.labor_income = round_cents(hh.labor_income * scale);
          imp.total_income = round_cents(imp.labor_income + (hh.total_income - hh.labor_income) * scale);
        }
        const auto region = feasible_region(imp, params.policy, params.market);
        if (!region) {
          feasible = false;
          break;
        }
        // Actual holdings: a mortgage inside the admissible interval, the
        // remaining liquid wealth split between stocks and deposits.
        const double share = region->mortgage_lo + mortgage_pos * (region->mortgage_hi - region->mortgage_lo);
        double mortgage = std::min(0.0, round_cents(share * w));
        double liquid = round_cents(w - h - mortgage);
        if (liquid < 0.0) {
          liquid = 0.0;
          mortgage = round_cents(w - h);
        }
        const double stocks = holds_stocks ? round_cents(liquid * stock_frac) : 0.0;
        imp.holdings = Holdings{stocks, round_cents(liquid - stocks), mortgage};
        imp.labels["income_band"] = income_band(imp.total_income);
        imp.labels["wealth_band"] = wealth_band(w);
        if (params.market.mortgage_rate > 0.0) {
          const ConstraintClass cc = classify_constraints(*imp.desired_housing, w, imp.total_income,
                                                          params.market.mortgage_rate, params.policy);
          imp.labels["constraint_class"] = constraint_label_name(cc.label);
        }
        imp.validate();
        group.push_back(std::move(imp));
      }
      if (feasible) break;
    }
    for (Household& hh : group) out.push_back(std::move(hh));
  }
  return out;
}

}  // namespace housefolio
