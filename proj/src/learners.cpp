#include "lar/learners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lar {

namespace {

constexpr double kGammaTol = 1e-12;
constexpr int kGammaMaxIter = 200;

void check_costs(const ActionDistribution& w, std::span<const double> c) {
  if (static_cast<std::size_t>(w.size()) != c.size()) {
    throw DomainError("learner update: cost dimension mismatch");
  }
  for (double x : c) {
    if (!std::isfinite(x)) throw DomainError("learner update: non-finite cost");
  }
}

std::vector<double> tilt_weights(std::span<const double> w, std::span<const double> c,
                                 double eta) {
  std::vector<double> out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = w[j] * std::exp(-eta * c[j]);
  return out;
}

}  // namespace

void LearnerConfig::validate() const {
  if (d < 1) throw DomainError("LearnerConfig: d must be >= 1");
  switch (kind) {
    case LearnerKind::TunedHedge:
      break;  // learning rate comes from the doubling schedule
    case LearnerKind::OptimisticHedge:
      if (!(eta > 0.0)) throw DomainError("LearnerConfig: eta must be positive");
      if (!(eta < 0.25)) {
        throw DomainError("LearnerConfig: optimistic hedge requires eta < 1/4");
      }
      break;
    case LearnerKind::NoisyHedge: {
      if (!(eta > 0.0)) throw DomainError("LearnerConfig: eta must be positive");
      const double th = theta < 0.0 ? (horizon_t > 0 ? 1.0 / horizon_t : -1.0) : theta;
      if (th < 0.0) {
        throw DomainError("LearnerConfig: noisy hedge needs theta or a horizon for 1/T");
      }
      if (th > 1.0) throw DomainError("LearnerConfig: theta outside [0, 1]");
      break;
    }
    case LearnerKind::LogBarrierBandit:
      // eta < 1 together with |observation| <= 1 keeps the played-coordinate
      // tilt inside (-1, 1), where the normalizer root is provably bracketed
      if (!(eta > 0.0 && eta < 1.0)) {
        throw DomainError("LearnerConfig: log-barrier bandit requires eta in (0, 1)");
      }
      break;
    default:
      if (!(eta > 0.0)) throw DomainError("LearnerConfig: eta must be positive");
      break;
  }
}

ActionDistribution hedge_update(const ActionDistribution& w, std::span<const double> c,
                                double eta) {
  if (!(eta > 0.0)) throw DomainError("hedge_update: eta must be positive");
  check_costs(w, c);
  return normalize(tilt_weights(w.span(), c, eta));
}

std::pair<ActionDistribution, ActionDistribution> optimistic_hedge_update(
    const ActionDistribution& g, std::span<const double> c, double eta) {
  if (!(eta > 0.0)) throw DomainError("optimistic_hedge_update: eta must be positive");
  check_costs(g, c);
  ActionDistribution g_next = normalize(tilt_weights(g.span(), c, eta));
  ActionDistribution w_next = normalize(tilt_weights(g_next.span(), c, eta));
  return {std::move(g_next), std::move(w_next)};
}

std::pair<ActionDistribution, ActionDistribution> noisy_hedge_update(
    const ActionDistribution& w, std::span<const double> c, double eta, double theta) {
  if (!(eta > 0.0)) throw DomainError("noisy_hedge_update: eta must be positive");
  if (theta < 0.0 || theta > 1.0) throw DomainError("noisy_hedge_update: theta outside [0, 1]");
  check_costs(w, c);
  ActionDistribution g_next = normalize(tilt_weights(w.span(), c, eta));
  ActionDistribution w_next = mix_with_uniform(g_next, theta);
  return {std::move(g_next), std::move(w_next)};
}

std::vector<double> importance_weighted_estimate(int played, double observed,
                                                 const ActionDistribution& w) {
  if (played < 0 || played >= w.size()) {
    throw DomainError("importance_weighted_estimate: played action out of range");
  }
  if (!std::isfinite(observed)) {
    throw DomainError("importance_weighted_estimate: non-finite observation");
  }
  const double wp = w[played];
  if (wp <= 0.0) {
    throw DivisionDomainError("importance_weighted_estimate: played action has zero mass");
  }
  std::vector<double> est(static_cast<std::size_t>(w.size()), 0.0);
  est[static_cast<std::size_t>(played)] = observed / wp;
  return est;
}

namespace {

double barrier_sum(std::span<const double> w, int played, double tilt, double gamma) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double extra = (static_cast<int>(j) == played) ? tilt : 0.0;
    s += w[j] / (1.0 + extra + gamma * w[j]);
  }
  return s;
}

}  // namespace

double solve_normalizer_gamma(const ActionDistribution& w, int played, double tilt) {
  if (played < 0 || played >= w.size()) {
    throw DomainError("solve_normalizer_gamma: played action out of range");
  }
  if (!std::isfinite(tilt)) throw DomainError("solve_normalizer_gamma: non-finite tilt");
  if (tilt <= -1.0) {
    // the played denominator 1 + tilt + gamma*w_p would start nonpositive
    throw DomainError("solve_normalizer_gamma: tilt must exceed -1");
  }
  if (tilt == 0.0) return 0.0;

  // S(gamma) is strictly decreasing wherever every denominator is positive,
  // so bisection on a sign-bracketing interval always converges.
  double lo, hi;
  if (tilt > 0.0) {
    // the tightest pole comes from either the played denominator, which
    // carries the tilt, or the largest weight among the other actions
    double pole = -(1.0 + tilt) / w[played];
    for (int a = 0; a < w.size(); ++a) {
      if (a != played && w[a] > 0.0) pole = std::max(pole, -1.0 / w[a]);
    }
    lo = pole * (1.0 - 1e-12);
    hi = 0.0;
    if (barrier_sum(w.span(), played, tilt, lo) < 1.0) {
      throw NumericalError("solve_normalizer_gamma: root escapes the cost-side bracket");
    }
  } else {
    lo = 0.0;
    hi = 1.0;
    int guard = 0;
    while (barrier_sum(w.span(), played, tilt, hi) > 1.0) {
      hi *= 2.0;
      if (++guard > 200) {
        throw NumericalError("solve_normalizer_gamma: no upper bracket found");
      }
    }
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < kGammaMaxIter; ++it) {
    mid = 0.5 * (lo + hi);
    const double s = barrier_sum(w.span(), played, tilt, mid);
    if (std::abs(s - 1.0) <= kGammaTol) return mid;
    if (s > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError("solve_normalizer_gamma: bisection did not reach tolerance");
}

ActionDistribution log_barrier_step(const ActionDistribution& w, int played, double tilt) {
  const double gamma = solve_normalizer_gamma(w, played, tilt);
  std::vector<double> out(static_cast<std::size_t>(w.size()));
  for (int j = 0; j < w.size(); ++j) {
    const double extra = (j == played) ? tilt : 0.0;
    out[static_cast<std::size_t>(j)] = w[j] / (1.0 + extra + gamma * w[j]);
  }
  return normalize(out);
}

std::vector<double> apply_mode(std::span<const double> payoffs, PayoffMode mode) {
  std::vector<double> out(payoffs.begin(), payoffs.end());
  if (mode == PayoffMode::Utility) {
    for (double& x : out) x = -x;
  }
  return out;
}

Learner::Learner(LearnerConfig config)
    : config_(config), current_(ActionDistribution::uniform(config.d)) {
  config_.validate();
  if (config_.kind == LearnerKind::NoisyHedge && config_.theta < 0.0) {
    config_.theta = 1.0 / config_.horizon_t;
  }
  if (config_.kind == LearnerKind::OptimisticHedge ||
      config_.kind == LearnerKind::NoisyHedge) {
    aux_ = current_;
  }
}

double Learner::tuned_eta() const {
  // eta_k = sqrt(log d / 2^k); with d = 1 the simplex is a point and any rate works
  const double logd = std::log(static_cast<double>(config_.d));
  return config_.d > 1 ? std::sqrt(logd / epoch_budget_) : 1.0;
}

void Learner::observe(const Feedback& feedback) {
  if (const auto* full = std::get_if<FullFeedback>(&feedback)) {
    if (config_.kind == LearnerKind::LogBarrierBandit) {
      throw ConfigError("log-barrier bandit consumes bandit feedback only");
    }
    observe_full(*full);
  } else {
    if (config_.kind != LearnerKind::LogBarrierBandit) {
      throw ConfigError("full-information learner cannot consume bandit feedback");
    }
    observe_bandit(std::get<BanditFeedback>(feedback));
  }
  ++round_;
}

void Learner::observe_full(const FullFeedback& fb) {
  const std::vector<double> c = apply_mode(fb.payoffs.span(), config_.mode);
  switch (config_.kind) {
    case LearnerKind::Hedge:
      current_ = hedge_update(current_, c, config_.eta);
      break;
    case LearnerKind::OptimisticHedge: {
      auto [g, w] = optimistic_hedge_update(*aux_, c, config_.eta);
      aux_ = std::move(g);
      current_ = std::move(w);
      break;
    }
    case LearnerKind::NoisyHedge: {
      auto [g, w] = noisy_hedge_update(current_, c, config_.eta, config_.theta);
      aux_ = std::move(g);
      current_ = std::move(w);
      break;
    }
    case LearnerKind::TunedHedge: {
      epoch_cost_ += expected_value(current_, c);
      if (epoch_cost_ > epoch_budget_) {
        // budget exhausted: next epoch, fresh uniform weights, doubled budget
        ++epoch_;
        epoch_budget_ *= 2.0;
        epoch_cost_ = 0.0;
        current_ = ActionDistribution::uniform(config_.d);
      } else {
        current_ = hedge_update(current_, c, tuned_eta());
      }
      break;
    }
    case LearnerKind::LogBarrierBandit:
      break;  // unreachable, filtered in observe()
  }
}

void Learner::observe_bandit(const BanditFeedback& fb) {
  if (config_.mode == PayoffMode::Cost && (fb.observed < 0.0 || fb.observed > 1.0)) {
    throw DomainError("bandit update: observed cost outside [0, 1]");
  }
  if (fb.observed < -1.0 || fb.observed > 1.0) {
    throw DomainError("bandit update: observed payoff outside [-1, 1]");
  }
  const double internal =
      config_.mode == PayoffMode::Utility ? -fb.observed : fb.observed;
  // Conceptually: form the importance-weighted estimate chat, then take the
  // mirror-descent step w_j / (1 + eta*w_j*chat_j + gamma*w_j). The played
  // coordinate's product w_p * chat_p collapses to the raw observation.
  if (current_[fb.played] <= 0.0) {
    throw DivisionDomainError("bandit update: played action has zero mass");
  }
  const double tilt = config_.eta * internal;
  current_ = log_barrier_step(current_, fb.played, tilt);
}

void Learner::reset() {
  current_ = ActionDistribution::uniform(config_.d);
  if (aux_) aux_ = current_;
  round_ = 1;
  epoch_ = 0;
  epoch_budget_ = 1.0;
  epoch_cost_ = 0.0;
}

}  // namespace lar
