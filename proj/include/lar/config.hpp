#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lar/engine.hpp"
#include "lar/learners.hpp"
#include "lar/metrics.hpp"

namespace lar {

// One entry of the config's "checks" array. Unused fields keep their
// defaults; which ones matter depends on `type`.
struct CheckSpec {
  std::string type;             // lar_fixed | lar_stable | efficiency | hp_bound |
                                // dynamic_bound | uniform_freeze | realized_deviation
  double epsilon = -1.0;        // required by every type except the freeze pair
  double max_residual = kCertTol;
  double max_gap = kCertTol;    // efficiency / hp_bound / dynamic_bound slack
  double delta = 0.05;          // hp_bound confidence
  double quantile = 0.95;       // hp_bound empirical quantile
  double max_deviation = 0.0;   // uniform_freeze gate
  double min_deviation = 1e-3;  // realized_deviation gate
  double turnover_kappa = -1.0; // dynamic_bound: expected stable changes per
                                // replacement; negative skips the sigma test
  double turnover_sigma = 3.0;
};

// Batch of learner-versus-stream runs: one cell per point of the
// epsilons x actions (x planted_shifts) grid.
struct StreamSuiteConfig {
  LearnerKind learner = LearnerKind::Hedge;
  std::vector<double> epsilons;
  std::vector<int> actions;
  std::vector<int> planted_shifts; // shifting comparator only
  int horizon_t = 10000;
  int streams_per_cell = 1;        // full-information cells
  int seeds = 200;                 // bandit repetitions per cell
  std::string comparator = "fixed";
  double max_residual = kCertTol;  // per-stream gate, full information
  double sigma_level = 3.0;        // bandit: mean residual <= level * SE
  std::vector<double> arm_means;   // bandit; empty = evenly spaced 0.3..0.7
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string kind;                       // "game" | "streams"
  std::optional<DynamicsConfig> dynamics; // kind == game
  std::vector<CheckSpec> checks;          // kind == game
  std::optional<StreamSuiteConfig> suite; // kind == streams
  std::uint64_t seed = 0;
  int threads = 0;                        // 0 = hardware concurrency
  int csv_stride = 1;                     // emit every Nth round
  std::uint64_t config_hash = 0;          // FNV-1a over the canonical dump
  std::string canonical_text;
};

std::uint64_t fnv1a64(const std::string& text);

// Reads a config file (JSON, // and /* */ comments allowed), validates it,
// and reports every violation at once. Missing file -> IoError; anything
// schema-shaped -> ConfigError.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace lar
