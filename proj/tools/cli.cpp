#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "housefolio/analysis.hpp"
#include "housefolio/config.hpp"
#include "housefolio/data.hpp"
#include "housefolio/feasibility.hpp"
#include "housefolio/oracle.hpp"
#include "housefolio/parallel.hpp"
#include "housefolio/solver.hpp"
#include "housefolio/valuefn.hpp"

namespace housefolio::cli {

namespace fs = std::filesystem;

namespace {

/// Bad command-line usage detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input problem found by the CLI layer (missing file, mismatched inputs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation finished but failed its numerical check.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string params_path;
  std::vector<std::string> overrides;
  unsigned threads = 0;
  double step_mortgage = GridSteps{}.mortgage;
  double step_stocks = GridSteps{}.stocks;
};

struct Context {
  ConfigFile config;
  ModelParams params;
  GridSteps steps;
  std::string header;  ///< first line of every output file
};

std::string share(double x) {
  std::string s = fmt::format("{:.6f}", x);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string value_text(double x) { return fmt::format("{:.12g}", x); }

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(fmt::format("missing {} path", what));
  if (!fs::is_regular_file(path)) throw InputError(fmt::format("{} not found: '{}'", what, path));
}

Context make_context(const CommonOptions& opts) {
  Context ctx;
  std::string path = opts.params_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env != nullptr) path = env;
  }
  if (!path.empty()) {
    require_file(path, "parameter file");
    ctx.config = ConfigFile::load(path);
  }
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError(fmt::format("--set expects key=value, got '{}'", kv));
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    ctx.config.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  ctx.params = params_from_config(ctx.config);
  if (!(opts.step_mortgage > 0.0) || !(opts.step_stocks > 0.0)) throw UsageError("grid steps must be positive");
  ctx.steps = GridSteps{opts.step_mortgage, opts.step_stocks};
  ctx.header = fmt::format("# housefolio {} params={:016x}", HOUSEFOLIO_VERSION, params_hash(ctx.params));
  return ctx;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw InputError(fmt::format("error writing '{}'", path.string()));
}

fs::path output_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("missing --out directory");
  fs::create_directories(dir);
  return dir;
}

std::string sweep_csv_header(bool with_axis) {
  return std::string(with_axis ? "axis,value," : "") +
         "records,solved,infeasible,invalid,stocks,deposits,mortgage,housing\n";
}

std::string sweep_csv_row(const SweepRow& r, bool with_axis) {
  std::string line = with_axis ? csv_escape(r.axis) + ',' + csv_escape(r.value) + ',' : "";
  line += fmt::format("{},{},{},{}", r.solved + r.infeasible + r.invalid, r.solved, r.infeasible, r.invalid);
  for (double m : r.mean_optimal) line += ',' + share(m);
  return line + '\n';
}

std::vector<std::string> sweep_text_row(const SweepRow& r) {
  std::vector<std::string> row{r.value, std::to_string(r.solved), std::to_string(r.infeasible),
                               std::to_string(r.invalid)};
  for (double m : r.mean_optimal) row.push_back(share(m));
  return row;
}

// ---------------------------------------------------------------- gen-data

struct GenDataOptions {
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen_data(const CommonOptions& common, const GenDataOptions& o, std::ostream& out) {
  const Context ctx = make_context(common);
  if (o.out.empty()) throw UsageError("missing --out file");
  const SynthRanges ranges = synth_ranges_from_config(ctx.config);
  const auto households = synthesize_households(o.n, o.seed, ranges, ctx.params);
  std::ostringstream text;
  text << ctx.header << " seed=" << o.seed << '\n';
  write_households(text, households);
  write_file(o.out, text.str());
  out << fmt::format("wrote {} records for {} households to {}\n", households.size(), o.n, o.out);
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string households;
  std::string out;
};

std::string solutions_csv(const std::string& header, std::span<const Solution> solutions) {
  std::string s = header + '\n';
  s += "id,imputation,status,case,f,stocks,deposits,housing,mortgage,grid_points,resolved_points,"
       "bankrupt_points,unbounded_points,failed_points,tolerant_points\n";
  for (const Solution& sol : solutions) {
    s += csv_escape(sol.household_id) + fmt::format(",{},{},", sol.imputation, status_name(sol.status));
    if (sol.ok()) {
      s += fmt::format("{},{},{},{},{},{}", case_name(sol.case_id), value_text(sol.value), share(sol.weights.stocks),
                       share(sol.weights.deposits), share(sol.weights.housing), share(sol.weights.mortgage));
    } else {
      s += ",,,,,";
    }
    s += fmt::format(",{},{},{},{},{},{}\n", sol.grid_size, sol.resolved_points(), sol.bankrupt_points,
                     sol.unbounded_points, sol.failed_points, sol.tolerant_matches);
  }
  return s;
}

int cmd_solve(const CommonOptions& common, const SolveOptions& o, std::ostream& out) {
  require_file(o.households, "household file");
  const Context ctx = make_context(common);
  const fs::path dir = output_dir(o.out);
  const auto households = load_households(o.households);
  const auto solutions = solve_population(households, ctx.params, ctx.steps, common.threads);
  const SweepRow summary = summarize(solutions, households);

  write_file(dir / "solutions.csv", solutions_csv(ctx.header, solutions));
  write_file(dir / "summary.csv", ctx.header + '\n' + sweep_csv_header(false) + sweep_csv_row(summary, false));

  std::string text = ctx.header + '\n';
  text += format_table({"population", "solved", "infeasible", "invalid", "stocks", "deposits", "mortgage", "housing"},
                       {[&] {
                         auto row = sweep_text_row(summary);
                         row[0] = "all";
                         return row;
                       }()});
  for (const Solution& s : solutions) {
    if (!s.ok()) text += fmt::format("{}: {} imputation {}\n", status_name(s.status), s.household_id, s.imputation);
  }
  write_file(dir / "summary.txt", text);
  out << fmt::format("solved {} of {} records ({} infeasible, {} invalid); results in {}\n", summary.solved,
                     solutions.size(), summary.infeasible, summary.invalid, dir.string());
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::string households;
  std::string out;
  std::string axis;
  std::vector<std::string> values;
};

int cmd_sweep(const CommonOptions& common, const SweepOptions& o, std::ostream& out) {
  require_file(o.households, "household file");
  const Context ctx = make_context(common);
  if (std::find(kSweepAxes.begin(), kSweepAxes.end(), o.axis) == kSweepAxes.end()) {
    throw UsageError(fmt::format("unknown sweep axis '{}'", o.axis));
  }
  if (o.values.empty()) throw UsageError("--values needs at least one value");
  const fs::path dir = output_dir(o.out);
  const auto households = load_households(o.households);
  const auto rows = sweep(households, ctx.params, o.axis, o.values, ctx.config, ctx.steps, common.threads);

  std::string csv = ctx.header + '\n' + sweep_csv_header(true);
  std::vector<std::vector<std::string>> table;
  for (const SweepRow& r : rows) {
    csv += sweep_csv_row(r, true);
    table.push_back(sweep_text_row(r));
  }
  write_file(dir / "sweep.csv", csv);
  write_file(dir / "sweep.txt",
             ctx.header + '\n' +
                 format_table({o.axis, "solved", "infeasible", "invalid", "stocks", "deposits", "mortgage", "housing"},
                              table));
  out << fmt::format("swept {} over {} values; results in {}\n", o.axis, rows.size(), dir.string());
  return kOk;
}

// ---------------------------------------------------------------- aggregate

struct AggregateOptions {
  std::string households;
  std::string solutions;
  std::string out;
  std::vector<std::string> groups{"all"};
};

std::vector<Solution> load_solutions(const std::string& path, std::span<const Household> households) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open solution file '{}'", path));
  std::map<std::pair<std::string, int>, Solution> by_key;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw InputError(fmt::format("{}: line {}: {}", path, line_no, what));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv_record(line);
    if (header.empty()) {
      header = fields;
      continue;
    }
    if (fields.size() != header.size()) fail("field count differs from header");
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
    for (const char* c : {"id", "imputation", "status", "stocks", "deposits", "housing", "mortgage", "f"}) {
      if (!row.count(c)) fail(fmt::format("missing column '{}'", c));
    }
    Solution s;
    s.household_id = row["id"];
    try {
      s.imputation = std::stoi(row["imputation"]);
      const std::string& status = row["status"];
      if (status == status_name(SolveStatus::Optimal)) {
        s.status = SolveStatus::Optimal;
        s.weights = {parse_number(row["stocks"]), parse_number(row["deposits"]), parse_number(row["housing"]),
                     parse_number(row["mortgage"])};
        s.value = parse_number(row["f"]);
      } else if (status == status_name(SolveStatus::Infeasible)) {
        s.status = SolveStatus::Infeasible;
      } else if (status == status_name(SolveStatus::AllPointsInvalid)) {
        s.status = SolveStatus::AllPointsInvalid;
      } else {
        fail(fmt::format("unknown status '{}'", status));
      }
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    } catch (const ConfigError& e) {
      fail(e.what());
    }
    const auto key = std::make_pair(s.household_id, s.imputation);
    if (!by_key.emplace(key, s).second) fail("duplicate household and imputation");
  }

  std::vector<Solution> aligned;
  aligned.reserve(households.size());
  for (const Household& hh : households) {
    const auto it = by_key.find({hh.id, hh.imputation});
    if (it == by_key.end()) {
      throw InputError(fmt::format("no solution for household {} imputation {}", hh.id, hh.imputation));
    }
    Solution s = it->second;
    if (s.ok()) {
      // Housing is fixed at the household's own ratio; the file carries it rounded.
      if (std::abs(s.weights.housing - hh.housing_ratio()) > 5e-7) {
        throw InputError(fmt::format("housing share of {} imputation {} does not match the household file", hh.id,
                                     hh.imputation));
      }
      s.weights.housing = hh.housing_ratio();
    }
    aligned.push_back(std::move(s));
  }
  if (aligned.size() != by_key.size()) throw InputError("solution file lists households absent from the household file");
  return aligned;
}

int cmd_aggregate(const CommonOptions& common, const AggregateOptions& o, std::ostream& out) {
  require_file(o.households, "household file");
  require_file(o.solutions, "solution file");
  const Context ctx = make_context(common);
  const fs::path dir = output_dir(o.out);
  const auto households = load_households(o.households);
  const auto solutions = load_solutions(o.solutions, households);

  std::string csv = ctx.header + '\n' +
                    "group_column,group,households,imputations,asset,optimal,actual,deviation,total_variance,z,flag\n";
  std::string text = ctx.header + '\n';
  std::size_t groups = 0;
  for (const std::string& column : o.groups) {
    const GroupReportResult res = group_reports(solutions, households, column);
    std::vector<std::vector<std::string>> table;
    for (const GroupReport& g : res.groups) {
      ++groups;
      for (Asset a : kAssets) {
        const AssetComparison& c = g.assets[static_cast<std::size_t>(a)];
        const std::string z = c.flag.degenerate ? "inf" : fmt::format("{:.4f}", c.flag.z);
        const std::string marker = significance_marker(c.flag.level);
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", csv_escape(column), csv_escape(g.group), g.households,
                           g.imputations, asset_name(a), share(c.optimal), share(c.actual), share(c.deviation),
                           fmt::format("{:.6e}", c.total_variance), z, marker);
        table.push_back({a == Asset::Stocks ? g.group : "", asset_name(a), share(c.optimal), share(c.actual),
                         share(c.deviation) + (marker.empty() ? "  " : marker == "*" ? "* " : marker),
                         c.flag.degenerate ? "zero variance" : ""});
      }
    }
    text += fmt::format("\nby {} ({} records excluded)\n", column, res.excluded);
    text += format_table({column, "asset", "optimal", "actual", "deviation", "note"}, table);
    for (const std::string& w : res.warnings) text += "warning: " + w + '\n';
  }
  text += "\n* p < 0.05, ** p < 0.01 (two-sided normal test, imputation-combined variance)\n";
  write_file(dir / "aggregate.csv", csv);
  write_file(dir / "aggregate.txt", text);
  out << fmt::format("aggregated {} records into {} groups; results in {}\n", households.size(), groups,
                     dir.string());
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string households;
  std::size_t household_index = 0;
  std::size_t points = 5;
  std::uint64_t seed = 1;
  std::size_t simulate = 0;
  std::size_t paths = 100'000;
  std::size_t horizon = 600;
  double tol = 1e-12;
  double rel_tol = 1e-5;
  std::string out;
};

/// Household used when no file is given: the average record of the survey sample.
Household reference_household() {
  Household hh;
  hh.id = "reference";
  hh.net_wealth = 159'542.0;
  hh.labor_income = 32'208.0;
  hh.total_income = 38'693.0;
  hh.housing_value = 204'552.0;
  return hh;
}

int cmd_verify(const CommonOptions& common, const VerifyOptions& o, std::ostream& out) {
  const Context ctx = make_context(common);
  Household hh = reference_household();
  if (!o.households.empty()) {
    require_file(o.households, "household file");
    const auto all = load_households(o.households);
    if (o.household_index >= all.size()) {
      throw UsageError(fmt::format("--household-index {} out of range ({} records)", o.household_index, all.size()));
    }
    hh = all[o.household_index];
  }
  if (o.points == 0) throw UsageError("--points must be positive");
  if (o.simulate > o.points) throw UsageError("--simulate cannot exceed --points");

  const auto region = feasible_region(hh, ctx.params.policy, ctx.params.market);
  if (!region) throw InputError(fmt::format("household {} is infeasible under the banking policy", hh.id));
  const PeriodParams period = to_per_period(ctx.params, hh.labor_ratio());
  const auto grid = generate_grid(*region, ctx.steps);

  // Sample distinct grid points where the case algebra yields a finite value.
  std::mt19937_64 rng(o.seed);
  std::vector<std::pair<PortfolioWeights, Evaluation>> picks;
  std::vector<bool> used(grid.size(), false);
  for (std::size_t attempt = 0; picks.size() < o.points && attempt < 1000 * o.points; ++attempt) {
    const std::size_t i = static_cast<std::size_t>(rng() % grid.size());
    if (used[i]) continue;
    used[i] = true;
    const Evaluation ev = select_case(grid[i], period);
    if (ev.status == EvalStatus::Ok) picks.emplace_back(grid[i], ev);
  }
  if (picks.size() < o.points) {
    throw InputError(fmt::format("only {} grid points with a finite value; {} requested", picks.size(), o.points));
  }

  std::vector<FixedPointReport> fixed(picks.size());
  parallel_for(picks.size(), common.threads,
               [&](std::size_t i) { fixed[i] = fixed_point_f(picks[i].first, period, o.tol); });
  std::vector<SimulationReport> sims(o.simulate);
  for (std::size_t i = 0; i < o.simulate; ++i) {
    SimulationOptions so;
    so.paths = o.paths;
    so.horizon = o.horizon;
    so.seed = o.seed;
    so.threads = common.threads;
    sims[i] = simulate_policy(picks[i].first, period, fixed[i].f, so);
  }

  std::string text = ctx.header + '\n';
  text += fmt::format("household {} imputation {} housing_ratio {} labor_ratio {} points {} seed {}\n", hh.id,
                      hh.imputation, share(hh.housing_ratio()), share(hh.labor_ratio()), picks.size(), o.seed);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& [w, ev] = picks[i];
    const FixedPointReport& fp = fixed[i];
    const double rel = std::abs(ev.value - fp.f) / std::abs(fp.f);
    const bool pass = fp.converged && rel <= o.rel_tol;
    failures += pass ? 0 : 1;
    text += fmt::format(
        "agreement {} {} case={} f_case={} f_fixed_point={} rel_diff={:.3e} iterations={} converged={} "
        "weights=({},{},{},{})\n",
        i + 1, pass ? "PASS" : "FAIL", case_name(ev.case_id), value_text(ev.value), value_text(fp.f), rel,
        fp.iterations, fp.converged ? "yes" : "no", share(w.stocks), share(w.deposits), share(w.housing),
        share(w.mortgage));
  }
  for (std::size_t i = 0; i < sims.size(); ++i) {
    const SimulationReport& s = sims[i];
    const double z = s.f_std_error > 0.0 ? (s.f - fixed[i].f) / s.f_std_error : 0.0;
    const bool pass = s.valid && std::abs(z) <= 3.0;
    failures += pass ? 0 : 1;
    text += fmt::format(
        "simulation {} {} f_simulated={} std_error={:.3e} f_fixed_point={} z={:.3f} paths={} horizon={} "
        "aborted={}\n",
        i + 1, pass ? "PASS" : "FAIL", value_text(s.f), s.f_std_error, value_text(fixed[i].f), z, s.paths,
        o.horizon, s.aborted);
  }
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
    out << fmt::format("verified {} points ({} simulated), {} failures; report in {}\n", picks.size(), sims.size(),
                       failures, o.out);
  }
  if (failures > 0) throw NumericalFailure(fmt::format("{} verification checks failed", failures));
  return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& c, bool grid) {
  cmd->add_option("--params", c.params_path, "Parameter file (key = value); defaults to $HOUSEFOLIO_CONFIG");
  cmd->add_option("--set", c.overrides, "Override a parameter, key=value (repeatable)")->take_all();
  if (grid) {
    cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores")->capture_default_str();
    cmd->add_option("--step-mortgage", c.step_mortgage, "Grid step for the mortgage share")->capture_default_str();
    cmd->add_option("--step-stocks", c.step_stocks, "Grid step for the stock share")->capture_default_str();
  }
}

}  // namespace

std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      if (c > 0) s += "  ";
      s += c == 0 ? fmt::format("{:<{}}", cell, width[c]) : fmt::format("{:>{}}", cell, width[c]);
    }
    const auto end = s.find_last_not_of(' ');
    return (end == std::string::npos ? std::string{} : s.substr(0, end + 1)) + '\n';
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + '\n';
  for (const auto& r : rows) out += line(r);
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal household portfolios with housing held fixed", "housefolio"};
  app.set_version_flag("--version", std::string(HOUSEFOLIO_VERSION));
  app.require_subcommand(1);

  CommonOptions common;

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic household CSV");
  add_common(gen_cmd, common, false);
  gen_cmd->add_option("-n,--n", gen.n, "Number of households")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output CSV file")->required();

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Optimal portfolio for every household");
  add_common(solve_cmd, common, true);
  solve_cmd->add_option("--households", solve.households, "Household CSV")->required();
  solve_cmd->add_option("-o,--out", solve.out, "Output directory")->required();

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Comparative statics over one parameter");
  add_common(sweep_cmd, common, true);
  sweep_cmd->add_option("--households", sw.households, "Household CSV")->required();
  sweep_cmd->add_option("-o,--out", sw.out, "Output directory")->required();
  sweep_cmd->add_option("--axis", sw.axis, "beta|gamma|mu|dt|ltv_cap|pti_cap|scenario_percentiles|stock_index_series")
      ->required();
  sweep_cmd->add_option("--values", sw.values, "Comma-separated values")->required()->delimiter(',');

  VerifyOptions ver;
  auto* verify_cmd = app.add_subcommand("verify", "Check case-selected values against the independent oracle");
  add_common(verify_cmd, common, true);
  verify_cmd->add_option("--households", ver.households, "Household CSV (default: the reference household)");
  verify_cmd->add_option("--household-index", ver.household_index, "Record to verify")->capture_default_str();
  verify_cmd->add_option("--points", ver.points, "Random grid points to check")->capture_default_str();
  verify_cmd->add_option("--seed", ver.seed, "Seed for point sampling and simulation")->capture_default_str();
  verify_cmd->add_option("--simulate", ver.simulate, "Points also checked by Monte Carlo")->capture_default_str();
  verify_cmd->add_option("--paths", ver.paths, "Simulated paths")->capture_default_str();
  verify_cmd->add_option("--horizon", ver.horizon, "Simulated periods per path")->capture_default_str();
  verify_cmd->add_option("--tol", ver.tol, "Fixed-point tolerance")->capture_default_str();
  verify_cmd->add_option("--rel-tol", ver.rel_tol, "Allowed relative disagreement")->capture_default_str();
  verify_cmd->add_option("-o,--out", ver.out, "Report file (default: standard output)");

  AggregateOptions agg;
  auto* agg_cmd = app.add_subcommand("aggregate", "Optimal versus actual shares by group");
  add_common(agg_cmd, common, false);
  agg_cmd->add_option("--households", agg.households, "Household CSV")->required();
  agg_cmd->add_option("--solutions", agg.solutions, "solutions.csv written by solve")->required();
  agg_cmd->add_option("-o,--out", agg.out, "Output directory")->required();
  agg_cmd->add_option("--group", agg.groups, "Group columns (comma-separated; 'all' for the population)")
      ->delimiter(',')
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "housefolio: usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(common, gen, out);
    if (*solve_cmd) return cmd_solve(common, solve, out);
    if (*sweep_cmd) return cmd_sweep(common, sw, out);
    if (*verify_cmd) return cmd_verify(common, ver, out);
    if (*agg_cmd) return cmd_aggregate(common, agg, out);
  } catch (const UsageError& e) {
    err << "housefolio: usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << "housefolio: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ValueFunctionError& e) {
    err << "housefolio: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InputError& e) {
    err << "housefolio: input error: " << e.what() << '\n';
    return kInput;
  } catch (const DataError& e) {
    err << "housefolio: input error: " << e.what() << '\n';
    return kInput;
  } catch (const ConfigError& e) {
    err << "housefolio: input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::invalid_argument& e) {
    err << "housefolio: input error: " << e.what() << '\n';
    return kInput;
  } catch (const fs::filesystem_error& e) {
    err << "housefolio: input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "housefolio: numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace housefolio::cli
