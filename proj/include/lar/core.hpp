#pragma once

#include <span>
#include <vector>

#include "lar/errors.hpp"

namespace lar {

// Validation slack for "sums to one". Learner updates renormalize every round,
// so distributions never drift anywhere near this.
inline constexpr double kSimplexTol = 1e-9;

// Probability distribution over d actions. Immutable once constructed;
// construction validates nonnegativity and unit mass.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> weights);

  static ActionDistribution uniform(int d);
  static ActionDistribution point_mass(int d, int j);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int j) const { return w_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& weights() const { return w_; }
  std::span<const double> span() const { return w_; }
  double min_weight() const;
  double max_weight() const;

  bool operator==(const ActionDistribution&) const = default;

 private:
  std::vector<double> w_;
};

// Per-action payoff vector as seen by one player. Cost entries live in [0, 1].
// Quasi-linear auction utilities may be negative (a loser who paid a bid),
// so the utility factory validates against [-1, 1] instead.
class CostVector {
 public:
  explicit CostVector(std::vector<double> costs);
  static CostVector utilities(std::vector<double> payoffs);

  int size() const { return static_cast<int>(c_.size()); }
  double operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& values() const { return c_; }
  std::span<const double> span() const { return c_; }

  bool operator==(const CostVector&) const = default;

 private:
  CostVector() = default;
  std::vector<double> c_;
};

// One pure action per player.
struct ActionProfile {
  std::vector<int> actions;

  int players() const { return static_cast<int>(actions.size()); }
  int operator[](int i) const { return actions[static_cast<std::size_t>(i)]; }
  bool operator==(const ActionProfile&) const = default;
};

// (lambda, mu) smoothness constants plus the epsilon slack used in bounds.
struct SmoothnessParams {
  double lambda = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
};

void validate_smoothness_params(const SmoothnessParams& p, bool utility_mode = false);

// Parameters of one low-approximate-regret certificate: the epsilon slack,
// the additive budget A(d,T), and the comparator's shift allowance.
struct LarParams {
  double epsilon = 0.0;
  double a_of_dt = 0.0;
  bool shifting = false;
  double shift_count_k = 0.0;

  void validate() const;
};

// Scale a nonnegative vector to unit mass. Throws ZeroMassError when the
// total mass is zero (or so small the division would be meaningless).
ActionDistribution normalize(std::span<const double> weights);

// (1 - theta) * w + theta * uniform, computed as w + theta*(1/d - w) so a
// distribution already at uniform stays bitwise uniform.
ActionDistribution mix_with_uniform(const ActionDistribution& w, double theta);

double expected_value(const ActionDistribution& w, std::span<const double> c);
double expected_value(const ActionDistribution& w, const CostVector& c);

}  // namespace lar
