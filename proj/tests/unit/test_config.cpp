#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "lar/config.hpp"

using namespace lar;

namespace {

const char* kMinimalGame = R"json({
  "schema_version": 1,
  "kind": "game",
  "game": {"family": "load_balancing", "players": 2, "actions": 2},
  "learners": [{"kind": "hedge", "eta": 0.1}],
  "horizon_t": 100
})json";

std::string error_text(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& err) {
    return err.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const ExperimentConfig cfg = parse_config_text(kMinimalGame);
  CHECK(cfg.schema_version == 1);
  CHECK(cfg.kind == "game");
  CHECK(cfg.seed == 0);
  CHECK(cfg.threads == 0);
  CHECK(cfg.csv_stride == 1);
  CHECK(cfg.checks.empty());
  REQUIRE(cfg.dynamics.has_value());
  const DynamicsConfig& dc = *cfg.dynamics;
  CHECK(dc.trials == 1);
  CHECK(dc.base_seed == 0);
  CHECK(dc.turnover_p == 0.0);
  CHECK(dc.feedback == FeedbackMode::Realized);
  CHECK(dc.horizon_t == 100);
  CHECK(dc.learners.size() == 2);  // single entry broadcast to both players
  CHECK(dc.learners[0].kind == LearnerKind::Hedge);
  CHECK(dc.learners[0].eta == 0.1);
  CHECK(dc.learners[0].d == 2);
  CHECK(dc.learners[0].mode == PayoffMode::Cost);
}

TEST_CASE("comments and whitespace do not change the hash") {
  const char* reordered = R"json({
    // same experiment, different spelling
    "horizon_t": 100,
    "learners": [{"eta": 0.1, "kind": "hedge"}],
    "game": {"actions": 2, "players": 2, "family": "load_balancing"},
    "kind": "game",
    "schema_version": 1 /* trailing note */
  })json";
  const ExperimentConfig a = parse_config_text(kMinimalGame);
  const ExperimentConfig b = parse_config_text(reordered);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.canonical_text == b.canonical_text);

  std::string changed = kMinimalGame;
  const auto at = changed.find("100");
  changed.replace(at, 3, "200");
  CHECK(parse_config_text(changed).config_hash != a.config_hash);
}

TEST_CASE("violations are collected into one error") {
  const char* broken = R"json({
    "schema_version": 2,
    "kind": "game",
    "game": {"family": "load_balancing", "players": 2, "actions": 2, "typo_key": 1},
    "learners": [{"kind": "hedge", "eta": 0.1}],
    "horizon_t": 100,
    "turnover_p": 1.5,
    "mystery": true
  })json";
  const std::string msg = error_text(broken);
  REQUIRE_FALSE(msg.empty());
  CHECK(msg.find("schema_version") != std::string::npos);
  CHECK(msg.find("typo_key") != std::string::npos);
  CHECK(msg.find("mystery") != std::string::npos);
  CHECK(msg.find("turnover_p") != std::string::npos);
}

TEST_CASE("malformed inputs") {
  CHECK_THROWS_AS(parse_config_text("not json at all"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[1, 2, 3]"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/path/to/config.json"), IoError);
  CHECK(error_text(R"json({"schema_version": 1, "kind": "nonsense"})json")
            .find("kind") != std::string::npos);
}

TEST_CASE("learner list must match the player count") {
  const char* two_of_three = R"json({
    "schema_version": 1,
    "kind": "game",
    "game": {"family": "load_balancing", "players": 3, "actions": 2},
    "learners": [{"kind": "hedge", "eta": 0.1}, {"kind": "hedge", "eta": 0.2}],
    "horizon_t": 10
  })json";
  CHECK(error_text(two_of_three).find("exactly 3") != std::string::npos);
}

TEST_CASE("expectation feedback is bounded by the enumeration budget") {
  // 5^9 opponent profiles exceed the enumeration budget; the full 5^10
  // profile space is still fine for the per-round optimum
  const char* too_big = R"json({
    "schema_version": 1,
    "kind": "game",
    "game": {"family": "first_price_auction", "players": 10, "actions": 5,
             "values": [0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9]},
    "learners": [{"kind": "hedge", "eta": 0.1}],
    "feedback": "expectation",
    "horizon_t": 10
  })json";
  CHECK(error_text(too_big).find("enumeration budget") != std::string::npos);

  std::string realized = too_big;
  const auto at = realized.find("expectation");
  realized.replace(at, std::string("expectation").size(), "realized");
  CHECK_NOTHROW(parse_config_text(realized));
}

TEST_CASE("check specs are validated") {
  SUBCASE("unknown type") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.1}],
      "horizon_t": 10,
      "checks": [{"type": "frobnicate"}]
    })json";
    CHECK(error_text(text).find("frobnicate") != std::string::npos);
  }
  SUBCASE("lar checks need a positive epsilon") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.1}],
      "horizon_t": 10,
      "checks": [{"type": "lar_fixed"}]
    })json";
    CHECK(error_text(text).find("epsilon") != std::string::npos);
  }
  SUBCASE("bound checks need the smoothness section") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.1}],
      "horizon_t": 10,
      "checks": [{"type": "efficiency", "epsilon": 0.1}]
    })json";
    CHECK(error_text(text).find("smoothness") != std::string::npos);
  }
  SUBCASE("hp_bound delta range") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.1}],
      "horizon_t": 10,
      "smoothness": {"lambda": 1.6667, "mu": 0.3333},
      "checks": [{"type": "hp_bound", "epsilon": 0.1, "delta": 0.0}]
    })json";
    CHECK(error_text(text).find("delta") != std::string::npos);
  }
  SUBCASE("valid checks parse with defaults") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "game",
      "game": {"family": "load_balancing", "players": 2, "actions": 2},
      "learners": [{"kind": "hedge", "eta": 0.1}],
      "horizon_t": 10,
      "checks": [{"type": "lar_fixed", "epsilon": 0.1},
                 {"type": "uniform_freeze"},
                 {"type": "realized_deviation"}]
    })json";
    const ExperimentConfig cfg = parse_config_text(text);
    REQUIRE(cfg.checks.size() == 3);
    CHECK(cfg.checks[0].max_residual == kCertTol);
    CHECK(cfg.checks[1].max_deviation == 0.0);
    CHECK(cfg.checks[2].min_deviation == 1e-3);
  }
}

TEST_CASE("stream suite configs") {
  SUBCASE("minimal suite") {
    const char* text = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "hedge", "epsilons": [0.1, 0.2], "actions": [2, 16],
                "horizon_t": 50, "streams_per_cell": 3}
    })json";
    const ExperimentConfig cfg = parse_config_text(text);
    REQUIRE(cfg.suite.has_value());
    CHECK(cfg.suite->learner == LearnerKind::Hedge);
    CHECK(cfg.suite->comparator == "fixed");
    CHECK(cfg.suite->planted_shifts.empty());
    CHECK(cfg.suite->max_residual == kCertTol);
    CHECK_FALSE(cfg.dynamics.has_value());
  }
  SUBCASE("epsilon cap depends on the learner") {
    const char* hedge_hot = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "hedge", "epsilons": [1.5], "actions": [2], "horizon_t": 10}
    })json";
    CHECK(error_text(hedge_hot).find("epsilons") != std::string::npos);
    const char* optimistic_hot = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "optimistic_hedge", "epsilons": [1.5], "actions": [2],
                "horizon_t": 10}
    })json";
    CHECK_NOTHROW(parse_config_text(optimistic_hot));
  }
  SUBCASE("comparator and planted shifts must agree") {
    const char* fixed_with_shifts = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "hedge", "epsilons": [0.1], "actions": [2], "horizon_t": 10,
                "planted_shifts": [1]}
    })json";
    CHECK(error_text(fixed_with_shifts).find("planted_shifts") != std::string::npos);
    const char* shifting_without = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "noisy_hedge", "epsilons": [0.1], "actions": [2],
                "horizon_t": 10, "comparator": "shifting"}
    })json";
    CHECK(error_text(shifting_without).find("planted_shifts") != std::string::npos);
  }
  SUBCASE("arm means are bandit-only and shape-checked") {
    const char* on_hedge = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "hedge", "epsilons": [0.1], "actions": [2], "horizon_t": 10,
                "arm_means": [0.3, 0.7]}
    })json";
    CHECK(error_text(on_hedge).find("arm_means") != std::string::npos);
    const char* wrong_len = R"json({
      "schema_version": 1,
      "kind": "streams",
      "suite": {"learner": "log_barrier_bandit", "epsilons": [0.1], "actions": [2, 3],
                "horizon_t": 10, "arm_means": [0.3, 0.7]}
    })json";
    CHECK(error_text(wrong_len).find("length must match") != std::string::npos);
  }
  SUBCASE("game keys are rejected under kind streams") {
    const char* mixed = R"json({
      "schema_version": 1,
      "kind": "streams",
      "horizon_t": 10,
      "suite": {"learner": "hedge", "epsilons": [0.1], "actions": [2], "horizon_t": 10}
    })json";
    CHECK(error_text(mixed).find("horizon_t") != std::string::npos);
  }
}

TEST_CASE("shipped configs parse") {
  namespace fs = std::filesystem;
  const fs::path root = LARSIM_SOURCE_DIR;
  CHECK_NOTHROW(parse_config((root / "configs" / "example.json").string()));
  int presets = 0;
  for (const auto& entry : fs::directory_iterator(root / "configs" / "presets")) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().filename().string());
    CHECK_NOTHROW(parse_config(entry.path().string()));
    ++presets;
  }
  CHECK(presets >= 10);
}
