#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lar/core.hpp"

namespace lar {

enum class GameFamily {
  LoadBalancing,
  AffineCongestion,
  FirstPriceAuction,
  AllPayAuction,
};

enum class Objective { CostMin, UtilityMax };

// Enumeration budgets. Exceeding one raises BudgetError before any work starts.
inline constexpr double kOptEnumBudget = 1e7;         // d^n profiles
inline constexpr double kSmoothnessEnumBudget = 1e8;  // d^(2n) profile pairs
inline constexpr double kExpectationEnumBudget = 1e6; // d^(n-1) opponent profiles

struct GameParams {
  GameFamily family = GameFamily::LoadBalancing;
  int players = 0;
  int actions = 0;

  // affine congestion: per-resource coefficients a_e * x + b_e, and the
  // resource subset used by each action. Empty action_sets means parallel
  // links (action j uses exactly resource j, so one resource per action).
  std::vector<double> resource_a;
  std::vector<double> resource_b;
  std::vector<std::vector<int>> action_sets;

  // load balancing: per-player bin multipliers in (0, 1]. Empty means all
  // ones, i.e. the plain cost = load / n game.
  std::vector<std::vector<double>> preferences;

  // single-item auctions: per-player values in (0, 1] and a shared ascending
  // bid grid of size `actions`. Empty grid means {j / actions : j = 0..d-1}.
  std::vector<double> values;
  std::vector<double> bid_grid;
};

struct SmoothnessCertificate {
  SmoothnessParams params;
  bool verified = false;
  // min over checked profiles of RHS - LHS; negative means a violation
  double worst_margin = 0.0;
  // (s, s_star) realizing the worst margin when verification fails
  std::optional<std::pair<ActionProfile, ActionProfile>> witness;
};

class Game {
 public:
  static Game make(GameParams params);

  GameFamily family() const { return p_.family; }
  Objective objective() const;
  int players() const { return p_.players; }
  int actions() const { return p_.actions; }
  const GameParams& params() const { return p_; }

  // Cost (CostMin) or quasi-linear utility (UtilityMax) of one player.
  double payoff(int player, const ActionProfile& s) const;
  // Mechanisms only: payment made and value received under the profile.
  double payment(int player, const ActionProfile& s) const;
  double value_of(int player, const ActionProfile& s) const;

  // Total cost, or total welfare (sum of values; payments are transfers).
  double social_objective(const ActionProfile& s) const;

  // Deviation payoffs for every player: entry x of player i's vector is
  // payoff_i(x, s_{-i}). Entry s_i reproduces the realized payoff.
  std::vector<CostVector> realized_cost_vectors(const ActionProfile& s) const;

  // Expected deviation payoffs of one player when opponents randomize
  // independently. Load balancing and affine congestion use exact closed
  // forms (costs are linear in resource load); auctions enumerate opponent
  // profiles. force_generic exists so tests can cross-check the closed forms.
  CostVector expected_cost_vector(std::span<const ActionDistribution> dists, int player,
                                  bool force_generic = false) const;

  struct Opt {
    ActionProfile profile;
    double value = 0.0;
  };
  // Exhaustive optimum of the social objective; lexicographically smallest
  // profile wins ties.
  Opt brute_force_opt() const;

  SmoothnessCertificate verify_smoothness(const SmoothnessParams& params) const;

  // Copies with one player's private parameters replaced (population turnover).
  Game with_preferences(int player, std::vector<double> prefs) const;
  Game with_value(int player, double value) const;

 private:
  Game() = default;

  GameParams p_;
  double congestion_norm_ = 1.0;
};

}  // namespace lar
