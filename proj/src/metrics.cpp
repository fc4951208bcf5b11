#include "lar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace lar {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("lar residual: epsilon must be positive");
}

void check_player(const Trajectory& traj, int player) {
  if (player < 0 || player >= traj.players) {
    throw DomainError("certificate: player out of range");
  }
}

}  // namespace

double lar_residual(double learner_total, double comparator_total, double epsilon,
                    double a_budget, double shift_k) {
  check_epsilon(epsilon);
  if (a_budget < 0.0) throw DomainError("lar residual: budget must be nonnegative");
  if (shift_k < 0.0) throw DomainError("lar residual: shift count must be nonnegative");
  return (1.0 - epsilon) * learner_total - comparator_total -
         (1.0 + shift_k) * a_budget / epsilon;
}

double lar_residual_utility(double learner_total, double comparator_total, double epsilon,
                            double a_budget, double shift_k) {
  check_epsilon(epsilon);
  if (a_budget < 0.0) throw DomainError("lar residual: budget must be nonnegative");
  if (shift_k < 0.0) throw DomainError("lar residual: shift count must be nonnegative");
  return comparator_total - (1.0 + epsilon) * learner_total -
         (1.0 + shift_k) * a_budget / epsilon;
}

FixedComparator best_fixed_from_totals(std::span<const double> totals) {
  if (totals.empty()) throw DomainError("best_fixed_comparator: empty totals");
  FixedComparator best{0, totals[0]};
  for (std::size_t j = 1; j < totals.size(); ++j) {
    if (totals[j] < best.total) {
      best.action = static_cast<int>(j);
      best.total = totals[j];
    }
  }
  return best;
}

FixedComparator best_fixed_comparator(std::span<const CostVector> history) {
  if (history.empty()) throw DomainError("best_fixed_comparator: empty history");
  const int d = history.front().size();
  std::vector<double> totals(static_cast<std::size_t>(d), 0.0);
  for (const auto& c : history) {
    if (c.size() != d) throw DomainError("best_fixed_comparator: ragged history");
    for (int j = 0; j < d; ++j) totals[static_cast<std::size_t>(j)] += c[j];
  }
  return best_fixed_from_totals(totals);
}

ShiftingComparator best_shifting_comparator(std::span<const CostVector> history,
                                            int max_shifts) {
  if (max_shifts < 0) throw DomainError("best_shifting_comparator: negative shift budget");
  if (history.empty()) throw DomainError("best_shifting_comparator: empty history");
  const int t_max = static_cast<int>(history.size());
  const int d = history.front().size();
  for (const auto& c : history) {
    if (c.size() != d) throw DomainError("best_shifting_comparator: ragged history");
  }

  ShiftingComparator out;
  out.actions.resize(static_cast<std::size_t>(t_max));

  if (max_shifts >= t_max - 1) {
    // unconstrained: follow the per-round argmin
    out.total = 0.0;
    for (int t = 0; t < t_max; ++t) {
      const auto& c = history[static_cast<std::size_t>(t)];
      int best = 0;
      for (int j = 1; j < d; ++j) {
        if (c[j] < c[best]) best = j;
      }
      out.actions[static_cast<std::size_t>(t)] = best;
      out.total += c[best];
    }
    return out;
  }

  // dp[k][j]: cheapest cost of rounds 1..t ending on action j with at most k
  // shifts. Transition: stay on j within layer k, or shift from layer k-1.
  const int layers = max_shifts + 1;
  const auto cell = [d](int k, int j) { return static_cast<std::size_t>(k * d + j); };
  std::vector<double> dp(static_cast<std::size_t>(layers * d));
  std::vector<double> next(dp.size());
  // parent word per (t, k, j): high bit set = stayed, else the action shifted from
  constexpr std::uint16_t kStayBit = 0x8000;
  std::vector<std::uint16_t> parent(
      static_cast<std::size_t>(t_max) * static_cast<std::size_t>(layers * d));

  for (int k = 0; k < layers; ++k) {
    for (int j = 0; j < d; ++j) dp[cell(k, j)] = history[0][j];
  }

  for (int t = 1; t < t_max; ++t) {
    const auto& c = history[static_cast<std::size_t>(t)];
    const std::size_t base =
        static_cast<std::size_t>(t) * static_cast<std::size_t>(layers * d);
    for (int k = 0; k < layers; ++k) {
      // two smallest entries of the previous layer, to allow j != argmin
      int arg1 = -1;
      double min1 = std::numeric_limits<double>::infinity();
      double min2 = min1;
      if (k > 0) {
        for (int j = 0; j < d; ++j) {
          const double v = dp[cell(k - 1, j)];
          if (v < min1) {
            min2 = min1;
            min1 = v;
            arg1 = j;
          } else if (v < min2) {
            min2 = v;
          }
        }
      }
      for (int j = 0; j < d; ++j) {
        double best = dp[cell(k, j)];
        std::uint16_t par = kStayBit | static_cast<std::uint16_t>(j);
        if (k > 0) {
          const double shifted = arg1 == j ? min2 : min1;
          if (shifted < best) {
            best = shifted;
            par = static_cast<std::uint16_t>(arg1 == j ? 0 : arg1);
            if (arg1 == j) {
              // recover the index attaining min2
              for (int q = 0; q < d; ++q) {
                if (q != j && dp[cell(k - 1, q)] == min2) {
                  par = static_cast<std::uint16_t>(q);
                  break;
                }
              }
            }
          }
        }
        next[cell(k, j)] = best + c[j];
        parent[base + cell(k, j)] = par;
      }
    }
    dp.swap(next);
  }

  int best_j = 0;
  for (int j = 1; j < d; ++j) {
    if (dp[cell(layers - 1, j)] < dp[cell(layers - 1, best_j)]) best_j = j;
  }
  out.total = dp[cell(layers - 1, best_j)];

  int k = layers - 1;
  int j = best_j;
  for (int t = t_max - 1; t >= 0; --t) {
    out.actions[static_cast<std::size_t>(t)] = j;
    if (t == 0) break;
    const std::size_t base =
        static_cast<std::size_t>(t) * static_cast<std::size_t>(layers * d);
    const std::uint16_t par = parent[base + cell(k, j)];
    if (par & kStayBit) {
      j = par & ~kStayBit;
    } else {
      j = par;
      --k;
    }
  }
  return out;
}

namespace {

LarCertificate finish_certificate(LarCertificate cert) {
  cert.residual = lar_residual(cert.learner_total, cert.comparator_total, cert.epsilon,
                               cert.a_budget, cert.shift_k);
  cert.satisfied = cert.residual <= kCertTol;
  return cert;
}

}  // namespace

LarCertificate lar_certificate_fixed(const Trajectory& traj, int player, double epsilon,
                                     double a_budget) {
  check_player(traj, player);
  LarCertificate cert;
  cert.player = player;
  cert.epsilon = epsilon;
  cert.a_budget = a_budget;
  cert.comparator = ComparatorKind::Fixed;
  cert.learner_total = traj.expected_cost[static_cast<std::size_t>(player)];
  cert.comparator_total =
      best_fixed_from_totals(traj.action_cost[static_cast<std::size_t>(player)]).total;
  return finish_certificate(cert);
}

LarCertificate lar_certificate_stable(const Trajectory& traj, int player, double epsilon,
                                      double a_budget) {
  check_player(traj, player);
  LarCertificate cert;
  cert.player = player;
  cert.epsilon = epsilon;
  cert.a_budget = a_budget;
  cert.comparator = ComparatorKind::Stable;
  cert.shift_k = traj.shifts[static_cast<std::size_t>(player)].k_tv;
  cert.learner_total = traj.expected_cost[static_cast<std::size_t>(player)];
  cert.comparator_total = traj.stable_cost[static_cast<std::size_t>(player)];
  return finish_certificate(cert);
}

double poa_bound_cost(const SmoothnessParams& params) {
  validate_smoothness_params(params, false);
  return params.lambda / (1.0 - params.mu - params.epsilon);
}

double welfare_fraction(const SmoothnessParams& params) {
  validate_smoothness_params(params, true);
  return params.lambda / std::max(params.mu, 1.0 + params.epsilon);
}

double poa_bound_utility(const SmoothnessParams& params) {
  validate_smoothness_params(params, true);
  return std::max(params.mu, 1.0 + params.epsilon) / params.lambda;
}

EfficiencyReport efficiency_report(double avg_social, double avg_opt,
                                   const SmoothnessParams& params, Objective objective,
                                   int players, long long horizon_t, double a_budget) {
  if (players < 1 || horizon_t < 1) {
    throw DomainError("efficiency_report: players and horizon must be positive");
  }
  if (!(params.epsilon > 0.0)) {
    throw DomainError("efficiency_report: epsilon must be positive");
  }
  EfficiencyReport report;
  report.avg_social = avg_social;
  report.avg_opt = avg_opt;
  const double per_player = a_budget / params.epsilon;
  if (objective == Objective::CostMin) {
    report.poa_bound = poa_bound_cost(params);
    report.additive_term = (static_cast<double>(players) / horizon_t) *
                           (1.0 / (1.0 - params.mu - params.epsilon)) * per_player;
    report.bound_satisfied =
        avg_social <= report.poa_bound * avg_opt + report.additive_term + kCertTol;
  } else {
    report.poa_bound = welfare_fraction(params);
    report.additive_term = (static_cast<double>(players) / horizon_t) *
                           (1.0 / std::max(params.mu, 1.0 + params.epsilon)) * per_player;
    report.bound_satisfied =
        avg_social >= report.poa_bound * avg_opt - report.additive_term - kCertTol;
  }
  return report;
}

double hp_gamma_from_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("hp_gamma_from_epsilon: epsilon must be positive");
  return 2.0 * epsilon / (1.0 + epsilon);
}

double epsilon_from_hp_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 2.0)) {
    throw DomainError("epsilon_from_hp_gamma: gamma outside (0, 2)");
  }
  return gamma / (2.0 - gamma);
}

HpBound hp_bound(const SmoothnessParams& params, int players, long long horizon_t,
                 double delta, double a_budget, double hp_gamma) {
  if (players < 1) throw DomainError("hp_bound: players must be positive");
  if (horizon_t < 4) throw DomainError("hp_bound: horizon must be at least 4");
  if (!(hp_gamma > 0.0)) throw DomainError("hp_bound: gamma must be positive");
  if (!(params.mu + hp_gamma < 1.0)) {
    throw DomainError("hp_bound: mu + gamma must be below 1");
  }
  const double log2_t = std::log2(static_cast<double>(horizon_t));
  const double delta_cap =
      std::min(1.0, static_cast<double>(players) * log2_t / std::exp(1.0));
  if (!(delta > 0.0 && delta < delta_cap)) {
    throw DomainError("hp_bound: delta outside (0, min(1, n*log2(T)/e))");
  }
  HpBound bound;
  bound.poa_coeff = params.lambda / (1.0 - params.mu - hp_gamma);
  const double tail = 4.0 * a_budget / hp_gamma +
                      12.0 * std::log(players * log2_t / delta) / hp_gamma;
  bound.additive = (static_cast<double>(players) / horizon_t) *
                   (1.0 / (1.0 - params.mu - hp_gamma)) * tail;
  return bound;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("empirical_quantile: empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("empirical_quantile: q outside (0, 1]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  if (rank == 0) rank = 1;
  return values[rank - 1];
}

DynamicReport dynamic_bound(std::span<const Trajectory> trials,
                            const SmoothnessParams& params, double a_budget) {
  if (trials.empty()) throw DomainError("dynamic_bound: no trials");
  validate_smoothness_params(params, false);
  if (!(params.epsilon > 0.0)) throw DomainError("dynamic_bound: epsilon must be positive");
  const int n = trials.front().players;
  const long long horizon = trials.front().horizon_t;

  DynamicReport report;
  for (const auto& traj : trials) {
    if (traj.players != n || traj.horizon_t != horizon) {
      throw DomainError("dynamic_bound: trials disagree on shape");
    }
    double social = 0.0;
    double opt = 0.0;
    for (int t = 0; t < traj.horizon_t; ++t) {
      social += traj.social[static_cast<std::size_t>(t)];
      opt += traj.opt[static_cast<std::size_t>(t)];
    }
    report.avg_social += social / traj.horizon_t;
    report.avg_opt += opt / traj.horizon_t;
    report.rho = std::max(report.rho, traj.rho_max);
    for (const auto& s : traj.shifts) {
      report.mean_k_changes += static_cast<double>(s.k_changes);
      report.mean_k_tv += s.k_tv;
    }
  }
  const auto m = static_cast<double>(trials.size());
  report.avg_social /= m;
  report.avg_opt /= m;
  report.mean_k_changes /= m;
  report.mean_k_tv /= m;

  report.poa_coeff = params.lambda * report.rho / (1.0 - params.mu - params.epsilon);
  report.additive = ((n + report.mean_k_tv) / static_cast<double>(horizon)) *
                    (1.0 / (1.0 - params.mu - params.epsilon)) *
                    (a_budget / params.epsilon);
  report.satisfied =
      report.avg_social <= report.poa_coeff * report.avg_opt + report.additive + kCertTol;
  return report;
}

double turnover_threshold(double epsilon, double min_cost_gamma, double kappa, int d,
                          long long horizon_t, TurnoverVariant variant) {
  if (!(epsilon > 0.0) || !(min_cost_gamma > 0.0) || !(kappa > 0.0)) {
    throw DomainError("turnover_threshold: parameters must be positive");
  }
  const double dt = static_cast<double>(d) * static_cast<double>(horizon_t);
  if (!(dt > 1.0)) throw DomainError("turnover_threshold: dT must exceed 1");
  const double base = epsilon * epsilon * min_cost_gamma / (kappa * std::log(dt));
  return variant == TurnoverVariant::Ours ? base : base * min_cost_gamma;
}

double individual_regret(const Trajectory& traj, int player) {
  check_player(traj, player);
  if (traj.horizon_t < 1) throw DomainError("individual_regret: empty trajectory");
  const auto& totals = traj.action_cost[static_cast<std::size_t>(player)];
  const double best = *std::min_element(totals.begin(), totals.end());
  return (traj.expected_cost[static_cast<std::size_t>(player)] - best) / traj.horizon_t;
}

double budget_for(LearnerKind kind, PayoffMode mode, int d, long long horizon_t,
                  double epsilon) {
  if (d < 1) throw DomainError("budget_for: d must be positive");
  const double logd = std::log(static_cast<double>(d));
  switch (kind) {
    case LearnerKind::Hedge:
      return mode == PayoffMode::Utility ? (std::exp(1.0) - 1.0) * logd : logd;
    case LearnerKind::TunedHedge:
      return 16.0 * logd;
    case LearnerKind::OptimisticHedge:
      return 8.0 * logd;
    case LearnerKind::NoisyHedge:
      if (horizon_t < 1) throw DomainError("budget_for: horizon must be positive");
      return 2.0 * std::log(static_cast<double>(d) * static_cast<double>(horizon_t));
    case LearnerKind::LogBarrierBandit: {
      if (horizon_t < d) throw DomainError("budget_for: bandit budget needs T >= d");
      if (!(epsilon > 0.0)) throw DomainError("budget_for: epsilon must be positive");
      const double ratio = static_cast<double>(horizon_t) / d;
      return d * std::log(ratio) * (1.0 + epsilon) + epsilon * d;
    }
  }
  throw DomainError("budget_for: unknown learner kind");
}

}  // namespace lar
