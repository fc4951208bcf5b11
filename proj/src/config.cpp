#include "lar/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "lar/errors.hpp"

namespace lar {
namespace {

using nlohmann::json;

// Gathers every violation before failing so a bad config is fixed in one
// round trip instead of one key at a time.
struct Issues {
  std::vector<std::string> items;

  void add(std::string msg) { items.push_back(std::move(msg)); }

  void raise_if_any() const {
    if (items.empty()) return;
    std::ostringstream os;
    os << "invalid experiment config:";
    for (const std::string& s : items) os << "\n  - " << s;
    throw ConfigError(os.str());
  }
};

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed, Issues& issues) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      issues.add(where + ": unknown key \"" + it.key() + "\"");
    }
  }
}

bool want_number(const json& obj, const char* key, const std::string& where, Issues& issues,
                 double& out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    issues.add(where + "." + key + ": expected a number");
    return false;
  }
  out = v.get<double>();
  return true;
}

bool want_int(const json& obj, const char* key, const std::string& where, Issues& issues,
              long long& out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    issues.add(where + "." + key + ": expected an integer");
    return false;
  }
  out = v.get<long long>();
  return true;
}

bool want_string(const json& obj, const char* key, const std::string& where, Issues& issues,
                 std::string& out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    issues.add(where + "." + key + ": expected a string");
    return false;
  }
  out = v.get<std::string>();
  return true;
}

bool want_number_array(const json& obj, const char* key, const std::string& where,
                       Issues& issues, std::vector<double>& out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_array()) {
    issues.add(where + "." + key + ": expected an array of numbers");
    return false;
  }
  out.clear();
  for (const json& e : v) {
    if (!e.is_number()) {
      issues.add(where + "." + key + ": expected an array of numbers");
      return false;
    }
    out.push_back(e.get<double>());
  }
  return true;
}

bool want_int_array(const json& obj, const char* key, const std::string& where, Issues& issues,
                    std::vector<int>& out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_array()) {
    issues.add(where + "." + key + ": expected an array of integers");
    return false;
  }
  out.clear();
  for (const json& e : v) {
    if (!e.is_number_integer()) {
      issues.add(where + "." + key + ": expected an array of integers");
      return false;
    }
    out.push_back(e.get<int>());
  }
  return true;
}

bool parse_family(const std::string& s, GameFamily& out) {
  if (s == "load_balancing") out = GameFamily::LoadBalancing;
  else if (s == "affine_congestion") out = GameFamily::AffineCongestion;
  else if (s == "first_price_auction") out = GameFamily::FirstPriceAuction;
  else if (s == "all_pay_auction") out = GameFamily::AllPayAuction;
  else return false;
  return true;
}

bool parse_learner_kind(const std::string& s, LearnerKind& out) {
  if (s == "hedge") out = LearnerKind::Hedge;
  else if (s == "tuned_hedge") out = LearnerKind::TunedHedge;
  else if (s == "optimistic_hedge") out = LearnerKind::OptimisticHedge;
  else if (s == "noisy_hedge") out = LearnerKind::NoisyHedge;
  else if (s == "log_barrier_bandit") out = LearnerKind::LogBarrierBandit;
  else return false;
  return true;
}

bool parse_feedback(const std::string& s, FeedbackMode& out) {
  if (s == "realized") out = FeedbackMode::Realized;
  else if (s == "expectation") out = FeedbackMode::Expectation;
  else if (s == "bandit") out = FeedbackMode::Bandit;
  else return false;
  return true;
}

std::optional<GameParams> parse_game(const json& g, Issues& issues) {
  if (!g.is_object()) {
    issues.add("game: expected an object");
    return std::nullopt;
  }
  reject_unknown_keys(g, "game",
                      {"family", "players", "actions", "preferences", "resource_a",
                       "resource_b", "action_sets", "values", "bid_grid"},
                      issues);

  GameParams p;
  std::string family;
  if (!want_string(g, "family", "game", issues, family)) {
    issues.add("game.family: required");
    return std::nullopt;
  }
  if (!parse_family(family, p.family)) {
    issues.add("game.family: unknown family \"" + family + "\"");
    return std::nullopt;
  }
  long long players = 0, actions = 0;
  if (!want_int(g, "players", "game", issues, players)) issues.add("game.players: required");
  if (!want_int(g, "actions", "game", issues, actions)) issues.add("game.actions: required");
  p.players = static_cast<int>(players);
  p.actions = static_cast<int>(actions);

  want_number_array(g, "resource_a", "game", issues, p.resource_a);
  want_number_array(g, "resource_b", "game", issues, p.resource_b);
  want_number_array(g, "values", "game", issues, p.values);
  want_number_array(g, "bid_grid", "game", issues, p.bid_grid);

  if (g.contains("action_sets")) {
    const json& v = g.at("action_sets");
    if (!v.is_array()) {
      issues.add("game.action_sets: expected an array of integer arrays");
    } else {
      for (const json& row : v) {
        std::vector<int> set;
        if (!row.is_array()) {
          issues.add("game.action_sets: expected an array of integer arrays");
          break;
        }
        for (const json& e : row) {
          if (!e.is_number_integer()) {
            issues.add("game.action_sets: expected an array of integer arrays");
            break;
          }
          set.push_back(e.get<int>());
        }
        p.action_sets.push_back(std::move(set));
      }
    }
  }

  if (g.contains("preferences")) {
    const json& v = g.at("preferences");
    if (v.is_array() && !v.empty() && v.front().is_number()) {
      // one row broadcast to every player
      std::vector<double> row;
      if (want_number_array(g, "preferences", "game", issues, row)) {
        p.preferences.assign(static_cast<std::size_t>(std::max(0, p.players)), row);
      }
    } else if (v.is_array()) {
      for (const json& row : v) {
        std::vector<double> one;
        if (!row.is_array()) {
          issues.add("game.preferences: expected rows of numbers");
          break;
        }
        for (const json& e : row) {
          if (!e.is_number()) {
            issues.add("game.preferences: expected rows of numbers");
            break;
          }
          one.push_back(e.get<double>());
        }
        p.preferences.push_back(std::move(one));
      }
    } else {
      issues.add("game.preferences: expected an array");
    }
  }
  return p;
}

std::vector<LearnerConfig> parse_learners(const json& root, int players, int actions,
                                          PayoffMode mode, Issues& issues) {
  std::vector<LearnerConfig> out;
  if (!root.contains("learners")) {
    issues.add("learners: required");
    return out;
  }
  const json& arr = root.at("learners");
  if (!arr.is_array() || arr.empty()) {
    issues.add("learners: expected a nonempty array");
    return out;
  }
  int index = 0;
  for (const json& entry : arr) {
    const std::string where = "learners[" + std::to_string(index++) + "]";
    if (!entry.is_object()) {
      issues.add(where + ": expected an object");
      continue;
    }
    reject_unknown_keys(entry, where, {"kind", "eta", "theta"}, issues);
    LearnerConfig lc;
    lc.d = actions;
    lc.mode = mode;
    std::string kind;
    if (!want_string(entry, "kind", where, issues, kind)) {
      issues.add(where + ".kind: required");
      continue;
    }
    if (!parse_learner_kind(kind, lc.kind)) {
      issues.add(where + ".kind: unknown learner \"" + kind + "\"");
      continue;
    }
    want_number(entry, "eta", where, issues, lc.eta);
    want_number(entry, "theta", where, issues, lc.theta);
    out.push_back(lc);
  }
  if (static_cast<int>(out.size()) == 1 && players > 1) {
    out.assign(static_cast<std::size_t>(players), out.front());
  } else if (!out.empty() && static_cast<int>(out.size()) != players) {
    issues.add("learners: expected 1 entry (shared) or exactly " + std::to_string(players));
  }
  return out;
}

CheckSpec parse_check(const json& entry, int index, Issues& issues) {
  const std::string where = "checks[" + std::to_string(index) + "]";
  CheckSpec spec;
  if (!entry.is_object()) {
    issues.add(where + ": expected an object");
    return spec;
  }
  reject_unknown_keys(entry, where,
                      {"type", "epsilon", "max_residual", "max_gap", "delta", "quantile",
                       "max_deviation", "min_deviation", "turnover_kappa", "turnover_sigma"},
                      issues);
  if (!want_string(entry, "type", where, issues, spec.type)) {
    issues.add(where + ".type: required");
    return spec;
  }
  static const std::set<std::string> kKnown = {
      "lar_fixed",     "lar_stable",     "efficiency",         "hp_bound",
      "dynamic_bound", "uniform_freeze", "realized_deviation",
  };
  if (!kKnown.count(spec.type)) {
    issues.add(where + ".type: unknown check \"" + spec.type + "\"");
    return spec;
  }
  want_number(entry, "epsilon", where, issues, spec.epsilon);
  want_number(entry, "max_residual", where, issues, spec.max_residual);
  want_number(entry, "max_gap", where, issues, spec.max_gap);
  want_number(entry, "delta", where, issues, spec.delta);
  want_number(entry, "quantile", where, issues, spec.quantile);
  want_number(entry, "max_deviation", where, issues, spec.max_deviation);
  want_number(entry, "min_deviation", where, issues, spec.min_deviation);
  want_number(entry, "turnover_kappa", where, issues, spec.turnover_kappa);
  want_number(entry, "turnover_sigma", where, issues, spec.turnover_sigma);

  const bool needs_epsilon = spec.type == "lar_fixed" || spec.type == "lar_stable" ||
                             spec.type == "efficiency" || spec.type == "hp_bound" ||
                             spec.type == "dynamic_bound";
  if (needs_epsilon && !(spec.epsilon > 0.0)) {
    issues.add(where + ".epsilon: required and must be positive for " + spec.type);
  }
  if (spec.type == "hp_bound") {
    if (!(spec.delta > 0.0 && spec.delta < 1.0)) issues.add(where + ".delta: must be in (0, 1)");
    if (!(spec.quantile > 0.0 && spec.quantile <= 1.0)) {
      issues.add(where + ".quantile: must be in (0, 1]");
    }
  }
  if (spec.type == "realized_deviation" && !(spec.min_deviation > 0.0)) {
    issues.add(where + ".min_deviation: must be positive");
  }
  if (!(spec.max_residual >= 0.0)) issues.add(where + ".max_residual: must be nonnegative");
  if (!(spec.max_gap >= 0.0)) issues.add(where + ".max_gap: must be nonnegative");
  return spec;
}

StreamSuiteConfig parse_suite(const json& root, Issues& issues) {
  StreamSuiteConfig suite;
  if (!root.contains("suite") || !root.at("suite").is_object()) {
    issues.add("suite: required object for kind \"streams\"");
    return suite;
  }
  const json& s = root.at("suite");
  reject_unknown_keys(s, "suite",
                      {"learner", "epsilons", "actions", "planted_shifts", "horizon_t",
                       "streams_per_cell", "seeds", "comparator", "max_residual",
                       "sigma_level", "arm_means"},
                      issues);
  std::string learner;
  if (!want_string(s, "learner", "suite", issues, learner)) {
    issues.add("suite.learner: required");
  } else if (!parse_learner_kind(learner, suite.learner)) {
    issues.add("suite.learner: unknown learner \"" + learner + "\"");
  }
  want_number_array(s, "epsilons", "suite", issues, suite.epsilons);
  want_int_array(s, "actions", "suite", issues, suite.actions);
  want_int_array(s, "planted_shifts", "suite", issues, suite.planted_shifts);
  long long tmp = 0;
  if (want_int(s, "horizon_t", "suite", issues, tmp)) suite.horizon_t = static_cast<int>(tmp);
  if (want_int(s, "streams_per_cell", "suite", issues, tmp)) {
    suite.streams_per_cell = static_cast<int>(tmp);
  }
  if (want_int(s, "seeds", "suite", issues, tmp)) suite.seeds = static_cast<int>(tmp);
  want_string(s, "comparator", "suite", issues, suite.comparator);
  want_number(s, "max_residual", "suite", issues, suite.max_residual);
  want_number(s, "sigma_level", "suite", issues, suite.sigma_level);
  want_number_array(s, "arm_means", "suite", issues, suite.arm_means);

  if (suite.epsilons.empty()) issues.add("suite.epsilons: required, nonempty");
  // the induced learning rate must stay legal: eta = eps (hedge, noisy),
  // eps/8 (optimistic, needs < 1/4), eps/(1+eps) (bandit, always < 1)
  double eps_cap = 1.0;
  if (suite.learner == LearnerKind::OptimisticHedge) eps_cap = 2.0;
  if (suite.learner == LearnerKind::LogBarrierBandit) {
    eps_cap = std::numeric_limits<double>::infinity();
  }
  for (double e : suite.epsilons) {
    if (!(e > 0.0 && e < eps_cap)) {
      issues.add("suite.epsilons: entries must lie in (0, " +
                 (std::isinf(eps_cap) ? std::string("inf") : std::to_string(eps_cap)) + ")");
      break;
    }
  }
  if (suite.actions.empty()) issues.add("suite.actions: required, nonempty");
  for (int d : suite.actions) {
    if (d < 1) {
      issues.add("suite.actions: entries must be >= 1");
      break;
    }
  }
  if (suite.horizon_t < 1) issues.add("suite.horizon_t: must be >= 1");
  if (suite.streams_per_cell < 1) issues.add("suite.streams_per_cell: must be >= 1");
  if (suite.seeds < 1) issues.add("suite.seeds: must be >= 1");
  if (suite.comparator != "fixed" && suite.comparator != "shifting") {
    issues.add("suite.comparator: expected \"fixed\" or \"shifting\"");
  }
  if (suite.comparator == "shifting" && suite.planted_shifts.empty()) {
    issues.add("suite.planted_shifts: required for the shifting comparator");
  }
  if (suite.comparator == "fixed" && !suite.planted_shifts.empty()) {
    issues.add("suite.planted_shifts: only valid with the shifting comparator");
  }
  for (int k : suite.planted_shifts) {
    if (k < 0) {
      issues.add("suite.planted_shifts: entries must be nonnegative");
      break;
    }
  }
  if (!(suite.max_residual >= 0.0)) issues.add("suite.max_residual: must be nonnegative");
  if (!(suite.sigma_level > 0.0)) issues.add("suite.sigma_level: must be positive");
  if (!suite.arm_means.empty()) {
    if (suite.learner != LearnerKind::LogBarrierBandit) {
      issues.add("suite.arm_means: only valid for log_barrier_bandit");
    }
    for (double m : suite.arm_means) {
      if (!(m >= 0.0 && m <= 1.0)) {
        issues.add("suite.arm_means: entries must lie in [0, 1]");
        break;
      }
    }
    for (int d : suite.actions) {
      if (d != static_cast<int>(suite.arm_means.size())) {
        issues.add("suite.arm_means: length must match every entry of suite.actions");
        break;
      }
    }
  }
  return suite;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Issues issues;
  if (!root.is_object()) {
    issues.add("top level: expected an object");
    issues.raise_if_any();
  }

  ExperimentConfig cfg;
  cfg.canonical_text = root.dump();
  cfg.config_hash = fnv1a64(cfg.canonical_text);

  long long schema = 0;
  if (!want_int(root, "schema_version", "top level", issues, schema)) {
    issues.add("schema_version: required");
  } else if (schema != 1) {
    issues.add("schema_version: expected 1, got " + std::to_string(schema));
  }
  cfg.schema_version = static_cast<int>(schema);

  if (!want_string(root, "kind", "top level", issues, cfg.kind)) {
    issues.add("kind: required (\"game\" or \"streams\")");
    issues.raise_if_any();
  }

  long long tmp = 0;
  if (want_int(root, "threads", "top level", issues, tmp)) cfg.threads = static_cast<int>(tmp);
  if (cfg.threads < 0) issues.add("threads: must be >= 0");
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (v.is_number_unsigned() || v.is_number_integer()) {
      cfg.seed = v.get<std::uint64_t>();
    } else {
      issues.add("seed: expected an integer");
    }
  }

  if (cfg.kind == "streams") {
    reject_unknown_keys(root, "top level",
                        {"schema_version", "kind", "suite", "seed", "threads"}, issues);
    cfg.suite = parse_suite(root, issues);
    issues.raise_if_any();
    return cfg;
  }
  if (cfg.kind != "game") {
    issues.add("kind: expected \"game\" or \"streams\", got \"" + cfg.kind + "\"");
    issues.raise_if_any();
  }

  reject_unknown_keys(root, "top level",
                      {"schema_version", "kind", "game", "learners", "feedback", "horizon_t",
                       "trials", "seed", "turnover_p", "redraw", "smoothness", "threads",
                       "csv_stride", "checks"},
                      issues);

  if (want_int(root, "csv_stride", "top level", issues, tmp)) {
    cfg.csv_stride = static_cast<int>(tmp);
  }
  if (cfg.csv_stride < 1) issues.add("csv_stride: must be >= 1");

  std::optional<GameParams> gp;
  if (!root.contains("game")) {
    issues.add("game: required for kind \"game\"");
  } else {
    gp = parse_game(root.at("game"), issues);
  }

  FeedbackMode feedback = FeedbackMode::Realized;
  std::string fb;
  if (want_string(root, "feedback", "top level", issues, fb) && !parse_feedback(fb, feedback)) {
    issues.add("feedback: expected realized, expectation, or bandit");
  }

  long long horizon = 0;
  if (!want_int(root, "horizon_t", "top level", issues, horizon)) {
    issues.add("horizon_t: required");
  }
  long long trials = 1;
  want_int(root, "trials", "top level", issues, trials);
  double turnover_p = 0.0;
  want_number(root, "turnover_p", "top level", issues, turnover_p);
  if (!(turnover_p >= 0.0 && turnover_p <= 1.0)) issues.add("turnover_p: outside [0, 1]");

  RedrawPolicy redraw;
  if (root.contains("redraw")) {
    const json& r = root.at("redraw");
    if (!r.is_object()) {
      issues.add("redraw: expected an object");
    } else {
      reject_unknown_keys(r, "redraw", {"pref_low", "pref_high", "value_floor"}, issues);
      want_number(r, "pref_low", "redraw", issues, redraw.pref_low);
      want_number(r, "pref_high", "redraw", issues, redraw.pref_high);
      want_number(r, "value_floor", "redraw", issues, redraw.value_floor);
    }
  }

  std::optional<SmoothnessParams> smoothness;
  if (root.contains("smoothness")) {
    const json& sm = root.at("smoothness");
    if (!sm.is_object()) {
      issues.add("smoothness: expected an object");
    } else {
      reject_unknown_keys(sm, "smoothness", {"lambda", "mu", "epsilon"}, issues);
      SmoothnessParams sp;
      bool have_lambda = want_number(sm, "lambda", "smoothness", issues, sp.lambda);
      bool have_mu = want_number(sm, "mu", "smoothness", issues, sp.mu);
      want_number(sm, "epsilon", "smoothness", issues, sp.epsilon);
      if (!have_lambda || !have_mu) {
        issues.add("smoothness: lambda and mu are required");
      } else {
        smoothness = sp;
      }
    }
  }

  if (root.contains("checks")) {
    const json& arr = root.at("checks");
    if (!arr.is_array()) {
      issues.add("checks: expected an array");
    } else {
      int index = 0;
      for (const json& entry : arr) cfg.checks.push_back(parse_check(entry, index++, issues));
    }
  }
  for (const CheckSpec& spec : cfg.checks) {
    const bool wants_smoothness = spec.type == "efficiency" || spec.type == "hp_bound" ||
                                  spec.type == "dynamic_bound";
    if (wants_smoothness && !smoothness.has_value()) {
      issues.add("checks: " + spec.type + " needs the smoothness section");
    }
  }

  if (gp.has_value()) {
    try {
      Game game = Game::make(*gp);
      const PayoffMode mode =
          game.objective() == Objective::CostMin ? PayoffMode::Cost : PayoffMode::Utility;
      std::vector<LearnerConfig> learners =
          parse_learners(root, game.players(), game.actions(), mode, issues);
      if (issues.items.empty()) {
        DynamicsConfig dc{.game = std::move(game),
                          .learners = std::move(learners),
                          .feedback = feedback,
                          .horizon_t = static_cast<int>(horizon),
                          .trials = static_cast<int>(trials),
                          .base_seed = cfg.seed,
                          .turnover_p = turnover_p,
                          .redraw = redraw,
                          .smoothness = smoothness,
                          .keep = TrajectoryOptions{.keep_weights = false,
                                                    .keep_costs = false,
                                                    .keep_regret = true}};
        try {
          dc.validate();
        } catch (const ConfigError& e) {
          issues.add(e.what());
        }
        cfg.dynamics = std::move(dc);
      }
    } catch (const Error& e) {
      issues.add(std::string("game: ") + e.what());
    }
  }

  issues.raise_if_any();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file: " + path);
  return parse_config_text(buf.str());
}

}  // namespace lar
