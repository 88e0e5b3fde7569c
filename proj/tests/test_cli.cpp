#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using housefolio::cli::run_cli;

namespace {

/// Scratch directory removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("housefolio_cli_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "housefolio");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    out.push_back(line);
  }
  return out;
}

std::size_t count_prefix(const std::string& text, const std::string& prefix) {
  std::size_t n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

/// Summary row without the header comment, for comparing solve and sweep.
std::string summary_values(const std::string& csv) { return data_lines(csv).at(0); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("missing household file exits with an input error naming the path") {
    TempDir dir;
    const Result r = run({"solve", "--households", dir / "absent.csv", "-o", dir / "out"});
    CHECK(r.code == housefolio::cli::kInput);
    CHECK(r.err.find("absent.csv") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }

  TEST_CASE("usage errors exit with code one") {
    CHECK(run({}).code == housefolio::cli::kUsage);
    CHECK(run({"frobnicate"}).code == housefolio::cli::kUsage);
    CHECK(run({"solve", "--households"}).code == housefolio::cli::kUsage);
    TempDir dir;
    CHECK(run({"gen-data", "-n", "3", "-o", dir / "h.csv", "--set", "beta"}).code == housefolio::cli::kUsage);
  }

  TEST_CASE("unknown parameters and sweep axes are input errors") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "2", "-o", dir / "h.csv"}).code == 0);
    CHECK(run({"solve", "--households", dir / "h.csv", "-o", dir / "o", "--set", "nonsense=1"}).code ==
          housefolio::cli::kInput);
    CHECK(run({"sweep", "--households", dir / "h.csv", "-o", dir / "s", "--axis", "theta", "--values", "2"}).code ==
          housefolio::cli::kUsage);
    CHECK(run({"sweep", "--households", dir / "h.csv", "-o", dir / "s", "--axis", "beta", "--values", "x"}).code ==
          housefolio::cli::kInput);
  }

  TEST_CASE("solving a ten-household fixture writes ten rows") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "10", "--seed", "3", "-o", dir / "h.csv"}).code == 0);
    const Result r = run({"solve", "--households", dir / "h.csv", "-o", dir / "out"});
    REQUIRE(r.code == 0);
    CHECK(data_lines(slurp(dir / "out/solutions.csv")).size() == 10);
    const std::string summary = slurp(dir / "out/summary.csv");
    CHECK(summary.rfind("# housefolio ", 0) == 0);
    CHECK(summary_values(summary).rfind("10,10,0,0,", 0) == 0);
  }

  TEST_CASE("every output file starts with the version and parameter hash") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "4", "-o", dir / "h.csv"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "h.csv", "-o", dir / "out"}).code == 0);
    for (const char* f : {"h.csv", "out/solutions.csv", "out/summary.csv", "out/summary.txt"}) {
      const std::string text = slurp(dir / f);
      CHECK_MESSAGE(text.rfind("# housefolio ", 0) == 0, f);
      CHECK(text.substr(0, text.find('\n')).find("params=") != std::string::npos);
    }
  }

  TEST_CASE("repeat runs and thread counts give identical bytes") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "8", "--seed", "5", "-o", dir / "a.csv"}).code == 0);
    REQUIRE(run({"gen-data", "-n", "8", "--seed", "5", "-o", dir / "b.csv"}).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    REQUIRE(run({"solve", "--households", dir / "a.csv", "-o", dir / "s1", "--threads", "1"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "a.csv", "-o", dir / "s2", "--threads", "1"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "a.csv", "-o", dir / "s4", "--threads", "4"}).code == 0);
    for (const char* f : {"solutions.csv", "summary.csv", "summary.txt"}) {
      CHECK(slurp(dir / (std::string("s1/") + f)) == slurp(dir / (std::string("s2/") + f)));
      CHECK(slurp(dir / (std::string("s1/") + f)) == slurp(dir / (std::string("s4/") + f)));
    }
  }

  TEST_CASE("generate, solve and aggregate form a consistent pipeline") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "6", "--seed", "2", "-o", dir / "h.csv", "--set", "synth.imputations=2"}).code ==
            0);
    REQUIRE(data_lines(slurp(dir / "h.csv")).size() == 12);
    REQUIRE(run({"solve", "--households", dir / "h.csv", "-o", dir / "out"}).code == 0);
    CHECK(data_lines(slurp(dir / "out/solutions.csv")).size() == 12);
    const std::string summary = summary_values(slurp(dir / "out/summary.csv"));
    const std::string solved = summary.substr(3, summary.find(',', 3) - 3);
    const Result agg =
        run({"aggregate", "--households", dir / "h.csv", "--solutions", dir / "out/solutions.csv", "-o", dir / "agg"});
    REQUIRE(agg.code == 0);
    const auto rows = data_lines(slurp(dir / "agg/aggregate.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(summary.rfind("12,", 0) == 0);
    CHECK(rows[0].rfind("all,all," + solved + ",2,stocks,", 0) == 0);
    CHECK(rows[3].find(",housing,") != std::string::npos);
  }

  TEST_CASE("aggregate rejects solutions from a different population") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "3", "--seed", "1", "-o", dir / "a.csv"}).code == 0);
    REQUIRE(run({"gen-data", "-n", "4", "--seed", "1", "-o", dir / "b.csv"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "a.csv", "-o", dir / "out"}).code == 0);
    const Result r =
        run({"aggregate", "--households", dir / "b.csv", "--solutions", dir / "out/solutions.csv", "-o", dir / "agg"});
    CHECK(r.code == housefolio::cli::kInput);
  }

  TEST_CASE("baseline-only sweep matches the solve summary") {
    TempDir dir;
    REQUIRE(run({"gen-data", "-n", "5", "--seed", "8", "-o", dir / "h.csv"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "h.csv", "-o", dir / "out"}).code == 0);
    REQUIRE(run({"sweep", "--households", dir / "h.csv", "-o", dir / "sw", "--axis", "mu", "--values", "0.25"}).code ==
            0);
    const std::string sweep_row = data_lines(slurp(dir / "sw/sweep.csv")).at(0);
    CHECK(sweep_row == "mu,0.25," + summary_values(slurp(dir / "out/summary.csv")));
  }

  TEST_CASE("verify on five points reports five agreement lines") {
    TempDir dir;
    const Result r = run({"verify", "--points", "5", "-o", dir / "verify.txt"});
    REQUIRE(r.code == 0);
    const std::string report = slurp(dir / "verify.txt");
    CHECK(count_prefix(report, "agreement ") == 5);
    CHECK(report.find(" FAIL ") == std::string::npos);
    const Result again = run({"verify", "--points", "5", "-o", dir / "verify2.txt"});
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "verify.txt") == slurp(dir / "verify2.txt"));
  }

  TEST_CASE("parameter file is read from the flag before the environment") {
    TempDir dir;
    {
      std::ofstream(dir / "p.conf") << "mu = 0.35\n";
    }
    REQUIRE(run({"gen-data", "-n", "3", "-o", dir / "h.csv"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "h.csv", "-o", dir / "a"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "h.csv", "-o", dir / "b", "--params", dir / "p.conf"}).code == 0);
    REQUIRE(run({"solve", "--households", dir / "h.csv", "-o", dir / "c", "--set", "mu=0.35"}).code == 0);
    const std::string base = slurp(dir / "a/summary.csv");
    const std::string file = slurp(dir / "b/summary.csv");
    CHECK(base.substr(0, base.find('\n')) != file.substr(0, file.find('\n')));
    CHECK(file == slurp(dir / "c/summary.csv"));
  }

  TEST_CASE("aligned table pads columns") {
    const std::string t = housefolio::cli::format_table({"name", "x"}, {{"a", "1.5"}, {"long", "10.25"}});
    CHECK(t == "name      x\n-----------\na       1.5\nlong  10.25\n");
  }
}
