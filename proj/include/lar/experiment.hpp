#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lar/config.hpp"

namespace lar {

struct OutputOptions {
  // when set, writes trajectory.csv, report.json, summary.txt under this dir
  std::optional<std::string> out_dir;
  bool dump_distributions = false;  // adds distributions.json (needs small runs)
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::ordered_json data;
};

struct ExperimentResult {
  std::vector<CheckResult> checks;
  nlohmann::ordered_json report;
  std::string summary;
  int exit_code = 0;  // 0 all checks passed, 1 otherwise
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const OutputOptions& out);

// 17 significant digits, '.' decimal point, locale independent
std::string format_real(double v);

}  // namespace lar
