#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace housefolio::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3 };

/// Environment variable naming the parameter file when --params is absent.
inline constexpr const char* kConfigEnv = "HOUSEFOLIO_CONFIG";

/// Runs the command line `args` (args[0] is the program name). Diagnostics
/// go to `err` as a single line; progress summaries go to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Left-aligned first column, right-aligned others, two-space gaps.
std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace housefolio::cli
