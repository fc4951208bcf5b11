#pragma once

#include <span>
#include <vector>

#include "lar/core.hpp"
#include "lar/engine.hpp"
#include "lar/learners.hpp"

namespace lar {

// Certificate slack absorbing float accumulation over runs of up to ~1e6
// rounds of [0,1] values (sums stay below ~1e6, doubles carry ~1e-10 of
// relative error at that scale).
inline constexpr double kCertTol = 1e-9;

enum class ComparatorKind { Fixed, ShiftingK, Stable };

struct LarCertificate {
  int player = 0;
  double epsilon = 0.0;
  double a_budget = 0.0;
  ComparatorKind comparator = ComparatorKind::Fixed;
  double shift_k = 0.0;  // K in the (1+K) budget factor
  double learner_total = 0.0;
  double comparator_total = 0.0;
  double residual = 0.0;
  bool satisfied = false;  // residual <= kCertTol
};

// residual of (1-eps)*W <= F + (1+K)*A/eps; certified when <= kCertTol
double lar_residual(double learner_total, double comparator_total, double epsilon,
                    double a_budget, double shift_k = 0.0);
// residual of (1+eps)*W >= F - (1+K)*A/eps for utility streams
double lar_residual_utility(double learner_total, double comparator_total, double epsilon,
                            double a_budget, double shift_k = 0.0);

struct FixedComparator {
  int action = 0;
  double total = 0.0;
};

// exact argmin over actions of cumulative cost, lowest index on ties
FixedComparator best_fixed_comparator(std::span<const CostVector> history);
FixedComparator best_fixed_from_totals(std::span<const double> totals);

struct ShiftingComparator {
  std::vector<int> actions;
  double total = 0.0;
};

// minimum-cost action sequence with at most max_shifts changes, by dynamic
// programming over (round, action, shifts used)
ShiftingComparator best_shifting_comparator(std::span<const CostVector> history,
                                            int max_shifts);

// Certificates over a recorded trajectory. The Fixed form reads the
// per-action totals; the Stable form compares against the recorded stable
// sequence with its total-variation weight.
LarCertificate lar_certificate_fixed(const Trajectory& traj, int player, double epsilon,
                                     double a_budget);
LarCertificate lar_certificate_stable(const Trajectory& traj, int player, double epsilon,
                                      double a_budget);

double poa_bound_cost(const SmoothnessParams& params);    // lambda/(1-mu-eps)
double welfare_fraction(const SmoothnessParams& params);  // lambda/max(mu, 1+eps)
double poa_bound_utility(const SmoothnessParams& params); // max(mu, 1+eps)/lambda

struct EfficiencyReport {
  double avg_social = 0.0;
  double avg_opt = 0.0;
  double poa_bound = 0.0;      // multiplies avg_opt
  double additive_term = 0.0;
  bool bound_satisfied = false;
};

EfficiencyReport efficiency_report(double avg_social, double avg_opt,
                                   const SmoothnessParams& params, Objective objective,
                                   int players, long long horizon_t, double a_budget);

double hp_gamma_from_epsilon(double epsilon);  // 2*eps/(1+eps)
double epsilon_from_hp_gamma(double gamma);    // gamma/(2-gamma)

struct HpBound {
  double poa_coeff = 0.0;  // multiplies OPT
  double additive = 0.0;
};

// High-probability efficiency bound: with probability 1-delta the average
// social cost stays below poa_coeff*OPT + additive. The caller compares the
// empirical (1-delta)-quantile across trials against it.
HpBound hp_bound(const SmoothnessParams& params, int players, long long horizon_t,
                 double delta, double a_budget, double hp_gamma);

// nearest-rank quantile (q in (0,1]): smallest value with rank >= ceil(q*N)
double empirical_quantile(std::vector<double> values, double q);

struct DynamicReport {
  double avg_social = 0.0;   // mean over trials of per-round average cost
  double avg_opt = 0.0;      // mean over trials of per-round average OPT^t
  double rho = 1.0;          // worst measured stable/OPT ratio across trials
  double poa_coeff = 0.0;    // lambda*rho/(1-mu-eps)
  double additive = 0.0;
  double mean_k_changes = 0.0;  // mean over trials of sum_i k_changes
  double mean_k_tv = 0.0;       // mean over trials of sum_i k_tv
  bool satisfied = false;
};

DynamicReport dynamic_bound(std::span<const Trajectory> trials,
                            const SmoothnessParams& params, double a_budget);

enum class TurnoverVariant { Ours, Prior };

// admissible turnover probability eps^2*gamma/(kappa*log(dT)), with an extra
// factor of gamma under the Prior variant
double turnover_threshold(double epsilon, double min_cost_gamma, double kappa, int d,
                          long long horizon_t, TurnoverVariant variant);

// (1/T) * (sum_t <w^t,c^t> - best fixed comparator total)
double individual_regret(const Trajectory& traj, int player);

// canonical A(d,T) for each learner at its designated parameterization
double budget_for(LearnerKind kind, PayoffMode mode, int d, long long horizon_t,
                  double epsilon);

}  // namespace lar
