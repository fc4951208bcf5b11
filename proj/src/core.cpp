#include "lar/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lar {

namespace {

void check_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace

ActionDistribution::ActionDistribution(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw DomainError("ActionDistribution: d must be >= 1");
  check_finite(w_, "ActionDistribution");
  double sum = 0.0;
  for (double x : w_) {
    if (x < 0.0) throw DomainError("ActionDistribution: negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw DomainError("ActionDistribution: weights sum to " + std::to_string(sum));
  }
}

ActionDistribution ActionDistribution::uniform(int d) {
  if (d < 1) throw DomainError("uniform: d must be >= 1");
  return ActionDistribution(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
}

ActionDistribution ActionDistribution::point_mass(int d, int j) {
  if (d < 1) throw DomainError("point_mass: d must be >= 1");
  if (j < 0 || j >= d) throw DomainError("point_mass: action out of range");
  std::vector<double> w(static_cast<std::size_t>(d), 0.0);
  w[static_cast<std::size_t>(j)] = 1.0;
  return ActionDistribution(std::move(w));
}

double ActionDistribution::min_weight() const {
  return *std::min_element(w_.begin(), w_.end());
}

double ActionDistribution::max_weight() const {
  return *std::max_element(w_.begin(), w_.end());
}

CostVector::CostVector(std::vector<double> costs) : c_(std::move(costs)) {
  if (c_.empty()) throw DomainError("CostVector: d must be >= 1");
  check_finite(c_, "CostVector");
  for (double x : c_) {
    // tiny slack for normalized game costs computed in floating point
    if (x < -1e-12 || x > 1.0 + 1e-12) {
      throw DomainError("CostVector: entry " + std::to_string(x) + " outside [0, 1]");
    }
  }
}

CostVector CostVector::utilities(std::vector<double> payoffs) {
  if (payoffs.empty()) throw DomainError("CostVector: d must be >= 1");
  check_finite(payoffs, "CostVector");
  for (double x : payoffs) {
    if (x < -1.0 - 1e-12 || x > 1.0 + 1e-12) {
      throw DomainError("CostVector: utility " + std::to_string(x) + " outside [-1, 1]");
    }
  }
  CostVector v;
  v.c_ = std::move(payoffs);
  return v;
}

void validate_smoothness_params(const SmoothnessParams& p, bool utility_mode) {
  if (!(p.lambda > 0.0)) throw DomainError("smoothness: lambda must be positive");
  if (p.mu < 0.0) throw DomainError("smoothness: mu must be nonnegative");
  if (p.epsilon < 0.0) throw DomainError("smoothness: epsilon must be nonnegative");
  if (!utility_mode && !(p.mu + p.epsilon < 1.0)) {
    throw DomainError("smoothness: mu + epsilon must be < 1 for cost bounds");
  }
}

void LarParams::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("LarParams: epsilon must be positive");
  if (!(a_of_dt > 0.0)) throw DomainError("LarParams: budget A(d,T) must be positive");
  if (shift_count_k < 0.0) throw DomainError("LarParams: shift count must be nonnegative");
  if (!shifting && shift_count_k != 0.0) {
    throw DomainError("LarParams: fixed comparator cannot carry shifts");
  }
}

ActionDistribution normalize(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("normalize: d must be >= 1");
  check_finite(weights, "normalize");
  double sum = 0.0;
  for (double x : weights) {
    if (x < 0.0) throw DomainError("normalize: negative weight");
    sum += x;
  }
  if (sum <= 0.0 || !std::isfinite(sum)) throw ZeroMassError("normalize: zero total mass");
  std::vector<double> out(weights.begin(), weights.end());
  for (double& x : out) x /= sum;
  return ActionDistribution(std::move(out));
}

ActionDistribution mix_with_uniform(const ActionDistribution& w, double theta) {
  if (theta < 0.0 || theta > 1.0) throw DomainError("mix_with_uniform: theta outside [0, 1]");
  const double pi = 1.0 / w.size();
  std::vector<double> out(w.weights());
  for (double& x : out) x += theta * (pi - x);
  return ActionDistribution(std::move(out));
}

double expected_value(const ActionDistribution& w, std::span<const double> c) {
  if (static_cast<std::size_t>(w.size()) != c.size()) {
    throw DomainError("expected_value: dimension mismatch");
  }
  double acc = 0.0;
  for (int j = 0; j < w.size(); ++j) acc += w[j] * c[static_cast<std::size_t>(j)];
  return acc;
}

double expected_value(const ActionDistribution& w, const CostVector& c) {
  return expected_value(w, c.span());
}

}  // namespace lar
