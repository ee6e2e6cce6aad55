#include <catch2/catch.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "zetares/cli.hpp"

using namespace zetares;
namespace fs = std::filesystem;

namespace {

std::string temp_file(const std::string& stem) {
  return (fs::temp_directory_path() / ("zetares_test_" + stem)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Data rows only: everything after the '#' header block and column line.
std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream is(csv);
  std::string line;
  bool past_columns = false;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!past_columns) {
      past_columns = true;  // column header
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& diag) {
  const auto parsed = cli::parse_args(args, diag);
  if (parsed.exit_code >= 0) return parsed.exit_code;
  return cli::run(parsed.config, diag);
}

}  // namespace

TEST_CASE("predict-bound emits the closed-form row", "[cli]") {
  const std::string out = temp_file("predict.csv");
  std::ostringstream diag;
  // log2 T = 10  <=>  T = e^(e^10).
  const double log10_T = std::exp(10.0) / std::numbers::ln10;
  const int code = run_cli({"predict-bound", "--T",
                            "1e" + std::to_string(log10_T), "--A", "1",
                            "--out", out},
                           diag);
  REQUIRE(code == 0);
  const auto rows = data_rows(slurp(out));
  REQUIRE(rows.size() == 1);
  // Columns: A, log2_T, predicted_bound.
  const auto last_comma = rows[0].rfind(',');
  const double value = std::stod(rows[0].substr(last_comma + 1));
  CHECK(value == Approx((std::numbers::e - 1.0) * 10.0).epsilon(1e-6));
}

TEST_CASE("unknown flags are rejected with exit 2", "[cli]") {
  std::ostringstream diag;
  const int code = run_cli({"predict-bound", "--T", "1e100", "--bogus", "3"},
                           diag);
  CHECK(code == 2);
  CHECK(diag.str().find("--bogus") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected with exit 2", "[cli]") {
  const std::string cfg_path = temp_file("bad_config.json");
  {
    std::ofstream f(cfg_path);
    f << R"({"command": "predict-bound", "T": "1e100", "banana": 1})";
  }
  std::ostringstream diag;
  const int code = run_cli({"--config", cfg_path}, diag);
  CHECK(code == 2);
  CHECK(diag.str().find("banana") != std::string::npos);
}

TEST_CASE("flags override config file keys", "[cli]") {
  const std::string cfg_path = temp_file("override.json");
  {
    std::ofstream f(cfg_path);
    f << R"({"command": "predict-bound", "T": "1e100", "A": 2.0})";
  }
  const std::string out = temp_file("override_out.csv");
  std::ostringstream diag;
  const int code =
      run_cli({"--config", cfg_path, "--A", "1", "--out", out}, diag);
  REQUIRE(code == 0);
  const auto rows = data_rows(slurp(out));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rfind("1,", 0) == 0);  // A column echoes the flag value
}

TEST_CASE("json round-trips the resolved config", "[cli]") {
  const std::string out = temp_file("roundtrip.json");
  std::ostringstream diag;
  const int code = run_cli({"scan-zeta", "--T", "1e4", "--A", "1", "--Y",
                            "100", "--seed", "9", "--top-k", "2", "--format",
                            "json", "--out", out},
                           diag);
  REQUIRE(code == 0);
  nlohmann::json doc = nlohmann::json::parse(slurp(out));
  REQUIRE(doc.contains("config"));
  REQUIRE(doc.contains("rows"));
  const auto& cfg = doc["config"];
  CHECK(cfg["command"] == "scan-zeta");
  CHECK(cfg["seed"].get<std::uint64_t>() == 9);
  CHECK(cfg["Y"].get<std::int64_t>() == 100);
  const double sigma = 1.0 - 1.0 / std::log(std::log(1e4));
  CHECK(cfg["sigma_A"].get<double>() == sigma);
  CHECK(cfg["log2_T"].get<double>() == std::log(std::log(1e4)));
  // Rows re-evaluate: value column parses back to a double.
  REQUIRE_FALSE(doc["rows"].empty());
  CHECK(doc["rows"][0]["value"].is_number_float());
}

TEST_CASE("csv floats round-trip", "[cli]") {
  // Shortest-round-trip formatting must reparse to the same double.
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, 2.5e-8}) {
    const std::string s = cli::fmt_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("scan-zeta replay is byte-identical and worker-independent",
          "[cli]") {
  const std::string out1 = temp_file("scan1.csv");
  const std::string out2 = temp_file("scan2.csv");
  const std::string out8 = temp_file("scan8.csv");
  std::ostringstream diag;
  const std::vector<std::string> base = {"scan-zeta", "--T", "2e4", "--A",
                                         "1",        "--Y", "500", "--seed",
                                         "4"};
  auto with = [&](const std::string& workers, const std::string& out) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers, "--out", out});
    return args;
  };
  REQUIRE(run_cli(with("1", out1), diag) == 0);
  REQUIRE(run_cli(with("2", out2), diag) == 0);
  REQUIRE(run_cli(with("8", out8), diag) == 0);
  const auto r1 = data_rows(slurp(out1));
  const auto r2 = data_rows(slurp(out2));
  const auto r8 = data_rows(slurp(out8));
  CHECK(r1 == r2);
  CHECK(r1 == r8);
  REQUIRE_FALSE(r1.empty());

  // Replay with identical config.
  const std::string out1b = temp_file("scan1b.csv");
  REQUIRE(run_cli(with("1", out1b), diag) == 0);
  CHECK(data_rows(slurp(out1b)) == r1);
}

TEST_CASE("exit codes map error classes", "[cli]") {
  std::ostringstream diag;

  SECTION("resolution error -> 3") {
    const int code = run_cli({"scan-zeta", "--T", "1e4", "--A", "1", "--Y",
                              "1000", "--grid-step", "0.5"},
                             diag);
    CHECK(code == 3);
  }

  SECTION("infeasible kappa plan -> 4") {
    const int code = run_cli({"kappa-plan", "--T", "1e6", "--A", "10000",
                              "--beta", "0.99"},
                             diag);
    CHECK(code == 4);
    CHECK(diag.str().find("kappa1") != std::string::npos);
  }

  SECTION("missing command -> 2") {
    CHECK(run_cli({}, diag) == 2);
  }

  SECTION("unknown command -> 2") {
    CHECK(run_cli({"frobnicate"}, diag) == 2);
  }

  SECTION("bad format -> 2") {
    CHECK(run_cli({"predict-bound", "--T", "1e100", "--format", "xml"},
                  diag) == 2);
  }
}

TEST_CASE("huge scales parse into the log domain", "[cli]") {
  CHECK(cli::parse_log_scale("1e10000") ==
        Approx(1e4 * std::numbers::ln10).epsilon(1e-12));
  CHECK(cli::parse_log_scale("2.5e300") ==
        Approx(std::log(2.5) + 300 * std::numbers::ln10).epsilon(1e-12));
  CHECK(cli::parse_log_scale("1000") == Approx(std::log(1000.0)));
  CHECK_THROWS_AS(cli::parse_log_scale("zebra"), std::domain_error);
  CHECK_THROWS_AS(cli::parse_log_scale("-5"), std::domain_error);
}

TEST_CASE("measure-set rows are worker-independent", "[cli]") {
  const std::string out1 = temp_file("measure1.csv");
  const std::string out8 = temp_file("measure8.csv");
  std::ostringstream diag;
  const std::vector<std::string> base = {
      "measure-set", "--T", "1e5",  "--A",       "1",   "--x",
      "3",           "--Y", "1000", "--samples", "2000", "--seed", "21"};
  auto with = [&](const std::string& workers, const std::string& out) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers, "--out", out});
    return args;
  };
  REQUIRE(run_cli(with("1", out1), diag) == 0);
  REQUIRE(run_cli(with("8", out8), diag) == 0);
  CHECK(data_rows(slurp(out1)) == data_rows(slurp(out8)));
}

TEST_CASE("remaining commands run end to end", "[cli]") {
  std::ostringstream diag;

  SECTION("prime-sum") {
    const std::string out = temp_file("prime_sum.csv");
    REQUIRE(run_cli({"prime-sum", "--T", "1e6", "--A", "1", "--X", "100000",
                     "--out", out},
                    diag) == 0);
    CHECK(data_rows(slurp(out)).size() == 1);
  }

  SECTION("gain-trend emits one row per scale") {
    const std::string out = temp_file("gain_trend.csv");
    REQUIRE(run_cli({"gain-trend", "--T", "1e100", "--T", "1e1000", "--A",
                     "1", "--kappa", "0.1", "--out", out},
                    diag) == 0);
    CHECK(data_rows(slurp(out)).size() == 2);
  }

  SECTION("resonator-stats") {
    const std::string out = temp_file("resonator_stats.csv");
    REQUIRE(run_cli({"resonator-stats", "--T", "1e6", "--A", "1", "--kappa",
                     "0.1", "--out", out},
                    diag) == 0);
    const auto rows = data_rows(slurp(out));
    REQUIRE(rows.size() == 1);
  }

  SECTION("moments-toy") {
    const std::string out = temp_file("moments_toy.csv");
    REQUIRE(run_cli({"moments-toy", "--T", "1e4", "--A", "1", "--X", "5",
                     "--Y", "50", "--samples", "10000", "--out", out},
                    diag) == 0);
    const auto rows = data_rows(slurp(out));
    REQUIRE(rows.size() == 1);
    // Inequality check columns land at the end as 1/0 flags.
    CHECK(rows[0].find(",1,1") != std::string::npos);
  }

  SECTION("verify-lemma1") {
    const std::string out = temp_file("lemma1.csv");
    REQUIRE(run_cli({"verify-lemma1", "--T", "1000", "--A", "0.04", "--Y",
                     "10000", "--samples", "5", "--out", out},
                    diag) == 0);
    CHECK(data_rows(slurp(out)).size() == 5);
  }

  SECTION("kappa-plan grid mode") {
    const std::string out = temp_file("kappa_plan.csv");
    REQUIRE(run_cli({"kappa-plan", "--T", "1e100", "--A", "1", "--beta",
                     "0.5", "--out", out},
                    diag) == 0);
    CHECK(data_rows(slurp(out)).size() == 1);
  }
}

TEST_CASE("count-exceeding and scan-characters run end to end", "[cli]") {
  const std::string out = temp_file("chars.csv");
  std::ostringstream diag;
  REQUIRE(run_cli({"scan-characters", "--q", "101", "--A", "0.5", "--Y",
                   "200", "--out", out},
                  diag) == 0);
  CHECK(data_rows(slurp(out)).size() == 1);

  const std::string out2 = temp_file("count.csv");
  REQUIRE(run_cli({"count-exceeding", "--q", "101", "--q", "211", "--A", "1",
                   "--x", "3", "--Y", "100", "--out", out2},
                  diag) == 0);
  CHECK(data_rows(slurp(out2)).size() == 2);
}
