#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "housefolio/model.hpp"

namespace housefolio {

/// Raised for unreadable or malformed configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` text configuration. '#' starts a comment; keys are unique.
///
/// Numeric values accept a plain decimal ('.' separator, no grouping) or a
/// ratio such as `1/12`. List values are comma separated.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text, const std::string& source = "<string>");
  static ConfigFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::vector<double>> get_list(const std::string& key) const;
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  /// Keys starting with `prefix`, with the prefix stripped.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::string> entries_;
  std::string source_;
};

double parse_number(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);

/// Sets one model parameter by its configuration key (beta, theta, gamma,
/// mu, dt, fee, ltv_cap, pti_cap, stock_return_low/mid/high, lambda_high,
/// lambda_mid, deposit_return, mortgage_rate, housing_return,
/// forgone_deposit_interest). Returns false for an unknown key.
bool set_model_param(ModelParams& params, const std::string& key, const std::string& value);

/// Applies every model key in `config` on top of `base`. When `stock_series`
/// is present the stock scenarios are rebuilt from it at
/// (scenario_low_pct, scenario_high_pct), default (25, 75). Keys under the
/// `synth.`, `series.` and `scenarios.` prefixes are left to their owners;
/// any other unknown key is an error.
ModelParams params_from_config(const ConfigFile& config, ModelParams base = ModelParams::baseline());

/// Stock scenarios named `name`: `scenarios.<name> = low, mid, high[, lambda_high, lambda_mid]`
/// or `series.<name> = r1, r2, ...` cut at the configured percentiles.
std::optional<Scenarios> named_scenarios(const ConfigFile& config, const std::string& name);

/// Canonical `key = value` text for a parameter set (sorted keys, 17 significant digits).
std::string to_config_text(const ModelParams& params);

/// FNV-1a 64-bit hash of the canonical text.
std::uint64_t params_hash(const ModelParams& params);

}  // namespace housefolio
