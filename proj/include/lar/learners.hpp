#pragma once

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "lar/core.hpp"

namespace lar {

enum class LearnerKind {
  Hedge,
  TunedHedge,
  OptimisticHedge,
  NoisyHedge,
  LogBarrierBandit,
};

enum class PayoffMode { Cost, Utility };

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Hedge;
  int d = 0;
  double eta = 0.0;
  // Noisy hedge uniform-mixing rate; negative means "default to 1/horizon_t".
  double theta = -1.0;
  PayoffMode mode = PayoffMode::Cost;
  int horizon_t = 0;

  void validate() const;
};

struct FullFeedback {
  CostVector payoffs;
};

struct BanditFeedback {
  int played = 0;
  double observed = 0.0;
};

using Feedback = std::variant<FullFeedback, BanditFeedback>;

// Multiplicative weights step: w'_j proportional to w_j * exp(-eta * c_j).
// Utility payoffs enter as negated costs, so c may be negative.
ActionDistribution hedge_update(const ActionDistribution& w, std::span<const double> c,
                                double eta);

// One optimistic step at the end of a round with observed cost c:
// g' proportional to g * exp(-eta c), then the next play distribution
// w' proportional to g' * exp(-eta c) (the prediction for the coming round
// is the cost just observed). Returns (g', w').
std::pair<ActionDistribution, ActionDistribution> optimistic_hedge_update(
    const ActionDistribution& g, std::span<const double> c, double eta);

// Noisy step: tilt the *play* distribution w by exp(-eta c), normalize into
// the auxiliary g', then mix toward uniform with rate theta. Returns (g', w').
std::pair<ActionDistribution, ActionDistribution> noisy_hedge_update(
    const ActionDistribution& w, std::span<const double> c, double eta, double theta);

// Unbiased estimate of the full cost vector from one observed coordinate:
// entry `played` is observed / w[played], all others zero.
std::vector<double> importance_weighted_estimate(int played, double observed,
                                                 const ActionDistribution& w);

// Lagrange multiplier for the log-barrier mirror-descent step. Solves
//   S(gamma) = w_p / (1 + tilt + gamma w_p) + sum_{j != p} w_j / (1 + gamma w_j) = 1
// to |S - 1| <= 1e-12. tilt >= 0 roots in (-1/max_j w_j, 0]; tilt < 0 roots in
// [0, inf). tilt == 0 returns exactly 0.
double solve_normalizer_gamma(const ActionDistribution& w, int played, double tilt);

// Full log-barrier step given the played-coordinate tilt (= eta * observed cost).
ActionDistribution log_barrier_step(const ActionDistribution& w, int played, double tilt);

// Cost mode is the identity; utility mode negates, mapping payoffs in [0,1]
// to internal costs in [-1,0].
std::vector<double> apply_mode(std::span<const double> payoffs, PayoffMode mode);

// Single-owner state machine for one player's algorithm. observe() consumes
// the feedback for the current round and advances to the next.
class Learner {
 public:
  explicit Learner(LearnerConfig config);

  const LearnerConfig& config() const { return config_; }
  const ActionDistribution& distribution() const { return current_; }
  // Auxiliary iterate g for the optimistic/noisy variants; equals the play
  // distribution for the others.
  const ActionDistribution& auxiliary() const { return aux_ ? *aux_ : current_; }
  int round() const { return round_; }
  int doubling_epoch() const { return epoch_; }
  double epoch_budget() const { return epoch_budget_; }

  void observe(const Feedback& feedback);
  void reset();

 private:
  void observe_full(const FullFeedback& fb);
  void observe_bandit(const BanditFeedback& fb);
  double tuned_eta() const;

  LearnerConfig config_;
  ActionDistribution current_;
  std::optional<ActionDistribution> aux_;
  int round_ = 1;
  int epoch_ = 0;
  double epoch_budget_ = 1.0;
  double epoch_cost_ = 0.0;
};

}  // namespace lar
