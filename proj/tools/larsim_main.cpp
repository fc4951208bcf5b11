#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lar/config.hpp"
#include "lar/errors.hpp"
#include "lar/experiment.hpp"

#ifndef LARSIM_PRESET_DIR_DEFAULT
#define LARSIM_PRESET_DIR_DEFAULT "configs/presets"
#endif

namespace {

std::string preset_path(const std::string& name) {
  std::string dir = LARSIM_PRESET_DIR_DEFAULT;
  if (const char* env = std::getenv("LARSIM_PRESET_DIR")) dir = env;
  return dir + "/" + name + ".json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"larsim: repeated-game learning dynamics simulator"};

  std::string config_path;
  std::string preset;
  std::string out_dir;
  int trials = -1;
  long long seed = -1;
  bool dump_distributions = false;

  app.add_option("--config", config_path, "experiment config file (JSON, // comments ok)");
  app.add_option("--preset", preset, "named preset from the checked-in preset directory");
  app.add_option("--out", out_dir, "output directory (trajectory.csv, report.json, summary.txt)");
  app.add_option("--trials", trials, "override the trial / repetition count");
  app.add_option("--seed", seed, "override the base seed");
  app.add_flag("--dump-distributions", dump_distributions,
               "also write per-round mixed strategies (small runs only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() == preset.empty()) {
      throw lar::ConfigError("exactly one of --config or --preset is required");
    }
    const std::string path = preset.empty() ? config_path : preset_path(preset);
    lar::ExperimentConfig cfg = lar::parse_config(path);

    if (seed >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed);
      if (cfg.dynamics) cfg.dynamics->base_seed = cfg.seed;
    }
    if (trials >= 1) {
      if (cfg.dynamics) cfg.dynamics->trials = trials;
      if (cfg.suite) {
        cfg.suite->streams_per_cell = trials;
        cfg.suite->seeds = trials;
      }
    }

    lar::OutputOptions out;
    if (!out_dir.empty()) out.out_dir = out_dir;
    out.dump_distributions = dump_distributions;

    const lar::ExperimentResult result = lar::run_experiment(cfg, out);
    std::cout << result.summary;
    return result.exit_code;
  } catch (const lar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
