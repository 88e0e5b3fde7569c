#include "housefolio/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace housefolio {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_plain(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("not a number: '{}'", text));
  }
  return value;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(fmt::format("not a boolean: '{}'", text));
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

}  // namespace

double parse_number(std::string_view text) {
  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw ConfigError(fmt::format("zero denominator in '{}'", text));
    return num / den;
  }
  return parse_plain(text);
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ConfigFile ConfigFile::parse(std::string_view text, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line_no));
    if (!cfg.entries_.emplace(key, value).second) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", source, line_no, key));
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open parameter file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ConfigFile::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  try {
    return parse_number(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: key '{}': {}", source_, key, e.what()));
  }
}

std::optional<std::vector<double>> ConfigFile::get_list(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  try {
    return parse_number_list(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: key '{}': {}", source_, key, e.what()));
  }
}

std::vector<std::string> ConfigFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) out.push_back(k.substr(prefix.size()));
  }
  return out;
}

bool set_model_param(ModelParams& p, const std::string& key, const std::string& value) {
  if (key == "forgone_deposit_interest") {
    p.liquidity_form = parse_bool(value) ? LiquidityForm::WithForgoneInterest : LiquidityForm::AppendixForm;
    return true;
  }
  double* slot = nullptr;
  if (key == "beta") slot = &p.prefs.beta;
  else if (key == "theta") slot = &p.prefs.theta;
  else if (key == "gamma") slot = &p.prefs.gamma;
  else if (key == "mu") slot = &p.prefs.mu;
  else if (key == "dt") slot = &p.prefs.dt;
  else if (key == "fee") slot = &p.market.fee;
  else if (key == "ltv_cap") slot = &p.policy.ltv_cap;
  else if (key == "pti_cap") slot = &p.policy.pti_cap;
  else if (key == "stock_return_low") slot = &p.market.stock_low;
  else if (key == "stock_return_mid") slot = &p.market.stock_mid;
  else if (key == "stock_return_high") slot = &p.market.stock_high;
  else if (key == "lambda_high") slot = &p.market.lambda_high;
  else if (key == "lambda_mid") slot = &p.market.lambda_mid;
  else if (key == "deposit_return") slot = &p.market.deposit_return;
  else if (key == "mortgage_rate") slot = &p.market.mortgage_rate;
  else if (key == "housing_return") slot = &p.market.housing_return;
  if (slot == nullptr) return false;
  *slot = parse_number(value);
  return true;
}

ModelParams params_from_config(const ConfigFile& config, ModelParams base) {
  static const std::vector<std::string> kOwnedElsewhere{"synth.", "series.", "scenarios."};
  for (const auto& [key, value] : config.entries()) {
    if (key == "stock_series" || key == "scenario_low_pct" || key == "scenario_high_pct") continue;
    if (std::any_of(kOwnedElsewhere.begin(), kOwnedElsewhere.end(),
                    [&](const std::string& pre) { return key.rfind(pre, 0) == 0; })) {
      continue;
    }
    try {
      if (!set_model_param(base, key, value)) {
        throw ConfigError(fmt::format("{}: unknown key '{}'", config.source(), key));
      }
    } catch (const ConfigError& e) {
      if (std::string_view(e.what()).find(config.source()) == 0) throw;
      throw ConfigError(fmt::format("{}: key '{}': {}", config.source(), key, e.what()));
    }
  }
  if (const auto series = config.get_list("stock_series")) {
    const double lo = config.get_double("scenario_low_pct").value_or(25.0);
    const double hi = config.get_double("scenario_high_pct").value_or(75.0);
    apply_scenarios(base.market, build_scenarios(*series, lo, hi));
  }
  base.validate();
  return base;
}

std::optional<Scenarios> named_scenarios(const ConfigFile& config, const std::string& name) {
  if (const auto triple = config.get_list("scenarios." + name)) {
    const auto& v = *triple;
    if (v.size() != 3 && v.size() != 5) {
      throw ConfigError(fmt::format("scenarios.{} needs 3 or 5 values, got {}", name, v.size()));
    }
    Scenarios s{v[0], v[1], v[2], 0.25, 0.5};
    if (v.size() == 5) {
      s.lambda_high = v[3];
      s.lambda_mid = v[4];
    }
    return s;
  }
  if (const auto series = config.get_list("series." + name)) {
    const double lo = config.get_double("scenario_low_pct").value_or(25.0);
    const double hi = config.get_double("scenario_high_pct").value_or(75.0);
    return build_scenarios(*series, lo, hi);
  }
  return std::nullopt;
}

std::string to_config_text(const ModelParams& p) {
  std::map<std::string, std::string> kv;
  const auto num = [](double x) { return fmt::format("{:.17g}", x); };
  kv["beta"] = num(p.prefs.beta);
  kv["theta"] = num(p.prefs.theta);
  kv["gamma"] = num(p.prefs.gamma);
  kv["mu"] = num(p.prefs.mu);
  kv["dt"] = num(p.prefs.dt);
  kv["fee"] = num(p.market.fee);
  kv["ltv_cap"] = num(p.policy.ltv_cap);
  kv["pti_cap"] = num(p.policy.pti_cap);
  kv["stock_return_low"] = num(p.market.stock_low);
  kv["stock_return_mid"] = num(p.market.stock_mid);
  kv["stock_return_high"] = num(p.market.stock_high);
  kv["lambda_high"] = num(p.market.lambda_high);
  kv["lambda_mid"] = num(p.market.lambda_mid);
  kv["deposit_return"] = num(p.market.deposit_return);
  kv["mortgage_rate"] = num(p.market.mortgage_rate);
  kv["housing_return"] = num(p.market.housing_return);
  kv["forgone_deposit_interest"] = p.liquidity_form == LiquidityForm::WithForgoneInterest ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += fmt::format("{} = {}\n", k, v);
  return out;
}

std::uint64_t params_hash(const ModelParams& params) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : to_config_text(params)) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace housefolio
