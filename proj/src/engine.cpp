#include "lar/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <utility>

namespace lar {

namespace {

// seed-stream purposes; see run_dynamics for usage
constexpr std::uint64_t kStreamSample = 1;
constexpr std::uint64_t kStreamTurnover = 2;
constexpr std::uint64_t kStreamRedraw = 3;
constexpr std::uint64_t kStreamInit = 4;

double profile_count(int players, int actions) {
  return std::pow(static_cast<double>(actions), static_cast<double>(players));
}

bool has_private_params(GameFamily family) {
  return family != GameFamily::AffineCongestion;
}

// evenly spaced multipliers over [lo, hi], shuffled into a private preference
std::vector<double> draw_preferences(int d, const RedrawPolicy& policy, Rng& rng) {
  std::vector<double> prefs(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    prefs[static_cast<std::size_t>(j)] =
        d > 1 ? policy.pref_low +
                    (policy.pref_high - policy.pref_low) * j / (d - 1)
              : policy.pref_high;
  }
  rng.shuffle(prefs);
  return prefs;
}

Game redraw_player(const Game& game, int player, const RedrawPolicy& policy, Rng& rng) {
  switch (game.family()) {
    case GameFamily::LoadBalancing:
      return game.with_preferences(player, draw_preferences(game.actions(), policy, rng));
    case GameFamily::FirstPriceAuction:
    case GameFamily::AllPayAuction:
      return game.with_value(player, rng.uniform(policy.value_floor, 1.0));
    case GameFamily::AffineCongestion:
      return game;
  }
  return game;
}

}  // namespace

std::vector<LearnerConfig> DynamicsConfig::resolved_learners() const {
  std::vector<LearnerConfig> out = learners;
  for (auto& cfg : out) {
    if (cfg.horizon_t <= 0) cfg.horizon_t = horizon_t;
  }
  return out;
}

void DynamicsConfig::validate() const {
  const int n = game.players();
  const int d = game.actions();
  std::vector<std::string> violations;

  if (horizon_t < 1) violations.push_back("horizon_t must be >= 1");
  if (trials < 1) violations.push_back("trials must be >= 1");
  if (!(turnover_p >= 0.0 && turnover_p <= 1.0)) {
    violations.push_back("turnover_p outside [0, 1]");
  }
  if (static_cast<int>(learners.size()) != n) {
    violations.push_back("need exactly one learner config per player");
  }
  if (!(redraw.pref_low > 0.0 && redraw.pref_low <= redraw.pref_high &&
        redraw.pref_high <= 1.0)) {
    violations.push_back("redraw preferences must satisfy 0 < pref_low <= pref_high <= 1");
  }
  if (!(redraw.value_floor > 0.0 && redraw.value_floor <= 1.0)) {
    violations.push_back("redraw value_floor outside (0, 1]");
  }

  const bool utility = game.objective() == Objective::UtilityMax;
  for (std::size_t i = 0; i < learners.size(); ++i) {
    const auto& cfg = learners[i];
    const std::string who = "learner " + std::to_string(i) + ": ";
    if (cfg.d != d) violations.push_back(who + "d does not match the game");
    if (utility != (cfg.mode == PayoffMode::Utility)) {
      violations.push_back(who + "payoff mode does not match the game objective");
    }
    const bool bandit_learner = cfg.kind == LearnerKind::LogBarrierBandit;
    if (bandit_learner != (feedback == FeedbackMode::Bandit)) {
      violations.push_back(who + "log-barrier bandit and Bandit feedback go together");
    }
    LearnerConfig resolved = cfg;
    if (resolved.horizon_t <= 0) resolved.horizon_t = horizon_t;
    try {
      resolved.validate();
    } catch (const DomainError& err) {
      violations.push_back(who + err.what());
    }
  }

  if (feedback == FeedbackMode::Expectation &&
      game.objective() == Objective::UtilityMax &&
      profile_count(n - 1, d) > kExpectationEnumBudget) {
    violations.push_back("expectation feedback exceeds the opponent enumeration budget");
  }
  if (profile_count(n, d) > kOptEnumBudget) {
    violations.push_back("per-round optimum exceeds the profile enumeration budget");
  }
  if (smoothness) {
    try {
      validate_smoothness_params(*smoothness, utility);
    } catch (const DomainError& err) {
      violations.push_back(std::string("smoothness: ") + err.what());
    }
  }

  if (!violations.empty()) {
    std::string message = "invalid dynamics config:";
    for (const auto& v : violations) {
      message += "\n  - ";
      message += v;
    }
    throw ConfigError(message);
  }
}

std::vector<int> turnover_step(int players, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("turnover_step: p outside [0, 1]");
  std::vector<int> replaced;
  for (int i = 0; i < players; ++i) {
    if (rng.bernoulli(p)) replaced.push_back(i);
  }
  return replaced;
}

int greedy_best_response(const Game& game, const ActionProfile& profile, int player) {
  ActionProfile probe = profile;
  const bool cost = game.objective() == Objective::CostMin;
  int best = 0;
  double best_value = 0.0;
  for (int x = 0; x < game.actions(); ++x) {
    probe.actions[static_cast<std::size_t>(player)] = x;
    const double v = game.payoff(player, probe);
    if (x == 0 || (cost ? v < best_value : v > best_value)) {
      best = x;
      best_value = v;
    }
  }
  return best;
}

StableStep stable_sequence_step(const Game& game, const ActionProfile& previous,
                                const std::vector<int>& replaced) {
  StableStep step;
  step.profile = previous;
  step.tv.assign(static_cast<std::size_t>(game.players()), 0.0);
  for (int i : replaced) {
    const int before = step.profile[i];
    const int after = greedy_best_response(game, step.profile, i);
    step.profile.actions[static_cast<std::size_t>(i)] = after;
    // point masses: L1 distance is 2 when the action moved, else 0
    step.tv[static_cast<std::size_t>(i)] = after == before ? 0.0 : 2.0;
  }
  return step;
}

std::vector<Feedback> dispatch_feedback(const Game& game, FeedbackMode mode,
                                        std::span<const ActionDistribution> weights,
                                        const ActionProfile& sampled) {
  const int n = game.players();
  std::vector<Feedback> out;
  out.reserve(static_cast<std::size_t>(n));
  switch (mode) {
    case FeedbackMode::Realized: {
      for (auto& c : game.realized_cost_vectors(sampled)) {
        out.emplace_back(FullFeedback{std::move(c)});
      }
      break;
    }
    case FeedbackMode::Expectation: {
      for (int i = 0; i < n; ++i) {
        out.emplace_back(FullFeedback{game.expected_cost_vector(weights, i)});
      }
      break;
    }
    case FeedbackMode::Bandit: {
      const auto realized = game.realized_cost_vectors(sampled);
      for (int i = 0; i < n; ++i) {
        out.emplace_back(BanditFeedback{sampled[i], realized[static_cast<std::size_t>(i)][sampled[i]]});
      }
      break;
    }
  }
  return out;
}

Trajectory run_dynamics(const DynamicsConfig& config, int trial) {
  config.validate();
  if (trial < 0) throw DomainError("run_dynamics: trial must be nonnegative");

  const int n = config.game.players();
  const int d = config.game.actions();
  const int horizon = config.horizon_t;
  const auto seed = config.base_seed;
  const auto tr = static_cast<std::uint64_t>(trial);

  std::vector<Rng> sample_rng;
  std::vector<Rng> redraw_rng;
  sample_rng.reserve(static_cast<std::size_t>(n));
  redraw_rng.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto pi = static_cast<std::uint64_t>(i);
    sample_rng.emplace_back(derive_seed({seed, tr, kStreamSample, pi}));
    redraw_rng.emplace_back(derive_seed({seed, tr, kStreamRedraw, pi}));
  }
  Rng turnover_rng(derive_seed({seed, tr, kStreamTurnover}));

  Game game = config.game;
  const bool dynamic = config.turnover_p > 0.0;
  if (dynamic && has_private_params(game.family())) {
    // in a dynamic population the starting players are themselves arrivals
    for (int i = 0; i < n; ++i) {
      Rng init(derive_seed({seed, tr, kStreamInit, static_cast<std::uint64_t>(i)}));
      game = redraw_player(game, i, config.redraw, init);
    }
  }

  std::vector<Learner> learners;
  learners.reserve(static_cast<std::size_t>(n));
  for (const auto& cfg : config.resolved_learners()) learners.emplace_back(cfg);

  const bool cost_game = game.objective() == Objective::CostMin;
  Game::Opt opt = game.brute_force_opt();
  ActionProfile stable = opt.profile;
  double stable_social = opt.value;

  Trajectory out;
  out.players = n;
  out.actions = d;
  out.horizon_t = horizon;
  out.feedback = config.feedback;
  out.social.reserve(static_cast<std::size_t>(horizon));
  out.opt.reserve(static_cast<std::size_t>(horizon));
  out.sampled.reserve(static_cast<std::size_t>(horizon));
  out.stable.reserve(static_cast<std::size_t>(horizon));
  out.replaced.resize(static_cast<std::size_t>(horizon));
  if (config.keep.keep_weights) out.weights.reserve(static_cast<std::size_t>(horizon));
  if (config.keep.keep_costs) out.costs.reserve(static_cast<std::size_t>(horizon));
  if (config.keep.keep_regret) out.regret.reserve(static_cast<std::size_t>(horizon));
  out.expected_cost.assign(static_cast<std::size_t>(n), 0.0);
  out.realized_cost.assign(static_cast<std::size_t>(n), 0.0);
  out.stable_cost.assign(static_cast<std::size_t>(n), 0.0);
  out.action_cost.assign(static_cast<std::size_t>(n),
                         std::vector<double>(static_cast<std::size_t>(d), 0.0));
  out.shifts.assign(static_cast<std::size_t>(n), ShiftStats{});

  auto update_rho = [&] {
    if (opt.value > 0.0 && stable_social > 0.0) {
      const double ratio = cost_game ? stable_social / opt.value : opt.value / stable_social;
      out.rho_max = std::max(out.rho_max, ratio);
    }
  };
  update_rho();

  const double inv_d = 1.0 / d;
  std::vector<ActionDistribution> ws;
  ws.reserve(static_cast<std::size_t>(n));
  ActionProfile s;
  s.actions.assign(static_cast<std::size_t>(n), 0);

  for (int t = 1; t <= horizon; ++t) {
    ws.clear();
    for (int i = 0; i < n; ++i) {
      ws.push_back(learners[static_cast<std::size_t>(i)].distribution());
      for (int j = 0; j < d; ++j) {
        out.max_uniform_deviation =
            std::max(out.max_uniform_deviation, std::abs(ws.back()[j] - inv_d));
      }
    }

    for (int i = 0; i < n; ++i) {
      s.actions[static_cast<std::size_t>(i)] =
          sample_rng[static_cast<std::size_t>(i)].sample(ws[static_cast<std::size_t>(i)].span());
    }

    const std::vector<CostVector> realized = game.realized_cost_vectors(s);
    std::vector<CostVector> expected;
    if (config.feedback == FeedbackMode::Expectation) {
      expected.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) expected.push_back(game.expected_cost_vector(ws, i));
    }
    const std::vector<CostVector>& fed =
        config.feedback == FeedbackMode::Expectation ? expected : realized;

    const double social_t = game.social_objective(s);
    out.social.push_back(social_t);
    out.opt.push_back(opt.value);
    out.sampled.push_back(s);
    out.stable.push_back(stable);

    double stable_deviation = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      out.expected_cost[ui] += expected_value(ws[ui], fed[ui]);
      out.realized_cost[ui] += realized[ui][s[i]];
      out.stable_cost[ui] += fed[ui][stable[i]];
      for (int a = 0; a < d; ++a) out.action_cost[ui][static_cast<std::size_t>(a)] += fed[ui][a];
      stable_deviation += realized[ui][stable[i]];
    }
    if (config.smoothness && cost_game) {
      const auto& sp = *config.smoothness;
      out.smoothness_margin =
          std::min(out.smoothness_margin,
                   sp.lambda * stable_social + sp.mu * social_t - stable_deviation);
    }

    if (config.keep.keep_weights) out.weights.push_back(ws);
    if (config.keep.keep_costs) out.costs.push_back(fed);
    if (config.keep.keep_regret) {
      std::vector<double> row(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const auto& totals = out.action_cost[static_cast<std::size_t>(i)];
        const double best =
            cost_game ? *std::min_element(totals.begin(), totals.end())
                      : *std::max_element(totals.begin(), totals.end());
        const double gap = cost_game ? out.expected_cost[static_cast<std::size_t>(i)] - best
                                     : best - out.expected_cost[static_cast<std::size_t>(i)];
        row[static_cast<std::size_t>(i)] = gap / t;
      }
      out.regret.push_back(std::move(row));
    }

    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (config.feedback == FeedbackMode::Bandit) {
        learners[ui].observe(BanditFeedback{s[i], realized[ui][s[i]]});
      } else {
        learners[ui].observe(FullFeedback{fed[ui]});
      }
    }

    if (dynamic && t < horizon) {
      std::vector<int> replaced = turnover_step(n, config.turnover_p, turnover_rng);
      if (!replaced.empty()) {
        for (int i : replaced) {
          game = redraw_player(game, i, config.redraw, redraw_rng[static_cast<std::size_t>(i)]);
          learners[static_cast<std::size_t>(i)].reset();
        }
        StableStep step = stable_sequence_step(game, stable, replaced);
        for (int i : replaced) {
          auto& stats = out.shifts[static_cast<std::size_t>(i)];
          stats.k_changes += 1;
          stats.k_tv += step.tv[static_cast<std::size_t>(i)];
        }
        stable = std::move(step.profile);
        opt = game.brute_force_opt();
        stable_social = game.social_objective(stable);
        update_rho();
        out.replaced[static_cast<std::size_t>(t - 1)] = std::move(replaced);
      }
    }
  }

  return out;
}

std::vector<Trajectory> run_trials(const DynamicsConfig& config, int threads) {
  config.validate();
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, config.trials);

  std::vector<Trajectory> out(static_cast<std::size_t>(config.trials));
  if (threads <= 1) {
    for (int trial = 0; trial < config.trials; ++trial) {
      out[static_cast<std::size_t>(trial)] = run_dynamics(config, trial);
    }
    return out;
  }

  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      out[static_cast<std::size_t>(trial)] = run_dynamics(config, trial);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace lar
