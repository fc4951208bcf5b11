#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lar/core.hpp"
#include "lar/games.hpp"
#include "lar/learners.hpp"
#include "lar/rng.hpp"

namespace lar {

enum class FeedbackMode { Realized, Expectation, Bandit };

// What a freshly arrived player looks like. Load-balancing players draw a
// random permutation of d evenly spaced bin multipliers in
// [pref_low, pref_high]; auction players draw a value in [value_floor, 1].
// Congestion players carry no private parameters, so replacement only resets
// their learner.
struct RedrawPolicy {
  double pref_low = 0.8;
  double pref_high = 1.0;
  double value_floor = 0.05;
};

struct TrajectoryOptions {
  bool keep_weights = true;  // per-round mixed strategies, all players
  bool keep_costs = true;    // per-round feedback vectors, all players
  bool keep_regret = false;  // per-round average-regret snapshots
};

struct DynamicsConfig {
  Game game;
  std::vector<LearnerConfig> learners;  // one per player
  FeedbackMode feedback = FeedbackMode::Realized;
  int horizon_t = 1;
  int trials = 1;
  std::uint64_t base_seed = 0;
  double turnover_p = 0.0;
  RedrawPolicy redraw;
  // enables per-round tracking of the pointwise smoothness margin
  std::optional<SmoothnessParams> smoothness;
  TrajectoryOptions keep;

  void validate() const;
  // learner configs with the run horizon filled in where it was left unset
  std::vector<LearnerConfig> resolved_learners() const;
};

struct ShiftStats {
  // one increment per replacement: a new player starts a new comparator
  // segment even when the greedy recompute lands on the same action
  long long k_changes = 0;
  // literal total variation sum_t ||s*_i^t - s*_i^{t-1}||_1, so 2 per
  // replacement that actually moved the action and 0 otherwise
  double k_tv = 0.0;
};

struct Trajectory {
  int players = 0;
  int actions = 0;
  int horizon_t = 0;
  FeedbackMode feedback = FeedbackMode::Realized;

  // per-round series, all of length horizon_t
  std::vector<double> social;                 // C(s^t) or SW(s^t)
  std::vector<double> opt;                    // OPT^t for the game in force
  std::vector<ActionProfile> sampled;         // s^t
  std::vector<ActionProfile> stable;          // s*^t
  std::vector<std::vector<int>> replaced;     // players replaced at end of round t
  std::vector<std::vector<ActionDistribution>> weights;  // when keep_weights
  std::vector<std::vector<CostVector>> costs;             // when keep_costs
  std::vector<std::vector<double>> regret;                // when keep_regret

  // whole-run per-player accumulators over the feedback stream
  std::vector<double> expected_cost;             // sum_t <w_i^t, c_i^t>
  std::vector<double> realized_cost;             // sum_t c_i^t[s_i^t]
  std::vector<double> stable_cost;               // sum_t c_i^t[s*_i^t]
  std::vector<std::vector<double>> action_cost;  // [player][a] sum_t c_i^t[a]
  std::vector<ShiftStats> shifts;

  double rho_max = 1.0;  // max_t C(s*^t)/OPT^t (inverted for welfare games)
  // min_t of lambda*C(s*^t) + mu*C(s^t) - sum_i c_i^t[s*_i^t]; negative
  // would contradict the game's smoothness certificate
  double smoothness_margin = std::numeric_limits<double>::infinity();
  double max_uniform_deviation = 0.0;  // max_t max_i ||w_i^t - uniform||_inf
};

Trajectory run_dynamics(const DynamicsConfig& config, int trial);

// Runs trials [0, config.trials) on up to `threads` workers (0 = hardware
// count) and returns them in trial order. Trials never share state.
std::vector<Trajectory> run_trials(const DynamicsConfig& config, int threads = 0);

// One round of population churn: each player is independently replaced with
// probability p. Returns the replaced players in index order.
std::vector<int> turnover_step(int players, double p, Rng& rng);

// Best response of one player against the others' actions in `profile`
// (cost argmin or utility argmax, lowest index on ties).
int greedy_best_response(const Game& game, const ActionProfile& profile, int player);

struct StableStep {
  ActionProfile profile;
  std::vector<double> tv;  // per player: ||s*_i^t - s*_i^{t-1}||_1
};

// Greedy stable-sequence update: replaced players best-respond in player
// index order against the frozen strategies of everyone else; survivors keep
// their action.
StableStep stable_sequence_step(const Game& game, const ActionProfile& previous,
                                const std::vector<int>& replaced);

// Realized -> full deviation vectors at s; Expectation -> exact expected
// vectors under the opponents' mixed strategies; Bandit -> the played
// action's realized scalar.
std::vector<Feedback> dispatch_feedback(const Game& game, FeedbackMode mode,
                                        std::span<const ActionDistribution> weights,
                                        const ActionProfile& sampled);

}  // namespace lar
