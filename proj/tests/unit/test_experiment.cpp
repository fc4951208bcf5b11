#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lar/experiment.hpp"

using namespace lar;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("larsim_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

int line_count(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

const char* kSmallRun = R"json({
  "schema_version": 1,
  "kind": "game",
  "game": {"family": "load_balancing", "players": 2, "actions": 2},
  "learners": [{"kind": "hedge", "eta": 0.3}],
  "horizon_t": 30,
  "trials": 3,
  "seed": 5,
  "checks": [{"type": "lar_fixed", "epsilon": 0.3}]
})json";

}  // namespace

TEST_CASE("reruns produce identical bytes") {
  const ExperimentConfig cfg = parse_config_text(kSmallRun);
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const ExperimentResult ra = run_experiment(cfg, {a.string(), false});
  const ExperimentResult rb = run_experiment(cfg, {b.string(), false});
  CHECK(ra.exit_code == 0);
  CHECK(rb.exit_code == 0);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "summary.txt") == slurp(b / "summary.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("csv rows follow trials, horizon, and stride") {
  SUBCASE("one trial, one round, one data row") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.3}],
      "horizon_t": 1
    })json";
    const fs::path dir = fresh_dir("one_row");
    run_experiment(parse_config_text(text), {dir.string(), false});
    const std::string csv = slurp(dir / "trajectory.csv");
    // three hash-comment lines, the column header, one data row
    CHECK(line_count(csv) == 5);
    CHECK(csv.find("# schema_version,1\n") == 0);
    CHECK(csv.find("trial,t,social_cost,opt,turnovers,regret_0,regret_1\n") !=
          std::string::npos);
    CHECK(csv.find("\n0,1,") != std::string::npos);
    fs::remove_all(dir);
  }
  SUBCASE("stride keeps every nth round") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.3}],
      "horizon_t": 10,
      "csv_stride": 5
    })json";
    const fs::path dir = fresh_dir("stride");
    run_experiment(parse_config_text(text), {dir.string(), false});
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(line_count(csv) == 6);  // rows t=1 and t=6 only
    CHECK(csv.find("\n0,1,") != std::string::npos);
    CHECK(csv.find("\n0,6,") != std::string::npos);
    CHECK(csv.find("\n0,2,") == std::string::npos);
    fs::remove_all(dir);
  }
}

TEST_CASE("failing checks set exit code one and are named") {
  const char* text = R"json({
    "schema_version": 1,
    "kind": "game",
    "game": {"family": "load_balancing", "players": 2, "actions": 2},
    "learners": [{"kind": "hedge", "eta": 0.3}],
    "feedback": "expectation",
    "horizon_t": 20,
    "checks": [{"type": "uniform_freeze"}, {"type": "realized_deviation"}]
  })json";
  const ExperimentResult result = run_experiment(parse_config_text(text), {});
  // symmetric expectation feedback never leaves uniform, so the freeze check
  // passes and the deviation check cannot
  CHECK(result.exit_code == 1);
  REQUIRE(result.checks.size() == 2);
  CHECK(result.checks[0].passed);
  CHECK_FALSE(result.checks[1].passed);
  CHECK(result.summary.find("[PASS] uniform_freeze") != std::string::npos);
  CHECK(result.summary.find("[FAIL] realized_deviation") != std::string::npos);
  CHECK(result.report["all_passed"] == false);
}

TEST_CASE("realized runs pass the deviation check") {
  const char* text = R"json({
    "schema_version": 1,
    "kind": "game",
    "game": {"family": "load_balancing", "players": 2, "actions": 2},
    "learners": [{"kind": "hedge", "eta": 0.3}],
    "horizon_t": 1500,
    "trials": 2,
    "seed": 7,
    "checks": [{"type": "realized_deviation"}, {"type": "lar_fixed", "epsilon": 0.3}]
  })json";
  const ExperimentResult result = run_experiment(parse_config_text(text), {});
  CHECK(result.exit_code == 0);
  CHECK(result.report["all_passed"] == true);
  CHECK(result.report["summary"]["max_uniform_deviation"].get<double>() > 1e-3);
}

TEST_CASE("distribution dumps mirror the run") {
  const char* text = R"json({
    "schema_version": 1,
    "kind": "game",
    "game": {"family": "load_balancing", "players": 2, "actions": 2},
    "learners": [{"kind": "hedge", "eta": 0.3}],
    "horizon_t": 4,
    "trials": 2
  })json";
  const fs::path dir = fresh_dir("dists");
  run_experiment(parse_config_text(text), {dir.string(), true});
  const nlohmann::json dists = nlohmann::json::parse(slurp(dir / "distributions.json"));
  REQUIRE(dists["trials"].size() == 2);
  CHECK(dists["trials"][0]["trial"] == 0);
  REQUIRE(dists["trials"][0]["weights"].size() == 4);   // rounds
  REQUIRE(dists["trials"][0]["weights"][0].size() == 2); // players
  CHECK(dists["trials"][0]["weights"][0][0].size() == 2); // actions
  CHECK(dists["trials"][0]["weights"][0][0][0].get<double>() == 0.5);
  fs::remove_all(dir);
}

TEST_CASE("stream suites emit a header-only csv and per-cell checks") {
  const char* text = R"json({
    "schema_version": 1,
    "kind": "streams",
    "seed": 3,
    "suite": {"learner": "hedge", "epsilons": [0.3], "actions": [2],
              "horizon_t": 200, "streams_per_cell": 4}
  })json";
  const fs::path dir = fresh_dir("streams");
  const ExperimentResult result = run_experiment(parse_config_text(text), {dir.string(), false});
  CHECK(result.exit_code == 0);
  REQUIRE(result.checks.size() == 1);
  CHECK(result.checks[0].name == "lar(eps=0.29999999999999999,d=2)");
  CHECK(result.report["run"]["total_runs"] == 4);
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(line_count(csv) == 4);  // headers only, no trajectory rows
  fs::remove_all(dir);
}

TEST_CASE("report layout is stable") {
  const ExperimentConfig cfg = parse_config_text(kSmallRun);
  const ExperimentResult result = run_experiment(cfg, {});
  CHECK(result.report["schema_version"] == 1);
  CHECK(result.report["kind"] == "game");
  CHECK(result.report["config_hash"].get<std::string>().size() == 16);
  CHECK(result.report["run"]["family"] == "load_balancing");
  CHECK(result.report["run"]["trials"] == 3);
  CHECK(result.report.contains("summary"));
  REQUIRE(result.report["checks"].size() == 1);
  CHECK(result.report["checks"][0]["name"] == "lar_fixed(eps=0.29999999999999999)");
  CHECK(result.summary.find("result: PASS (1/1 checks)") != std::string::npos);
}

TEST_CASE("format_real round trips") {
  const std::vector<double> values{0.0,        0.1,     -0.1,   1.0 / 3.0, 12345.6789,
                                   6.02e23,    1e-300,  -1e17,  0.29999999999999999,
                                   2.5,        1e-9,    42.0};
  for (double v : values) {
    const std::string s = format_real(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_real(2.5) == "2.5");
  CHECK(format_real(0.1) == "0.10000000000000001");
}
