#include "lar/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lar {

namespace {

// Odometer increment over profiles in lexicographic order (last player
// fastest). Returns false once every profile has been visited.
bool next_profile(std::vector<int>& s, int d) {
  for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
    if (++s[static_cast<std::size_t>(i)] < d) return true;
    s[static_cast<std::size_t>(i)] = 0;
  }
  return false;
}

double profile_count(int players, int actions) {
  return std::pow(static_cast<double>(actions), static_cast<double>(players));
}

void check_profile(const ActionProfile& s, int players, int actions) {
  if (s.players() != players) throw DomainError("profile: wrong number of players");
  for (int a : s.actions) {
    if (a < 0 || a >= actions) throw DomainError("profile: action out of range");
  }
}

}  // namespace

Game Game::make(GameParams params) {
  Game g;
  const int n = params.players;
  const int d = params.actions;
  if (n < 1) throw DomainError("game: players must be >= 1");
  if (d < 1) throw DomainError("game: actions must be >= 1");

  switch (params.family) {
    case GameFamily::LoadBalancing: {
      if (params.preferences.empty()) {
        params.preferences.assign(static_cast<std::size_t>(n),
                                  std::vector<double>(static_cast<std::size_t>(d), 1.0));
      }
      if (static_cast<int>(params.preferences.size()) != n) {
        throw DomainError("load balancing: need one preference vector per player");
      }
      for (const auto& pref : params.preferences) {
        if (static_cast<int>(pref.size()) != d) {
          throw DomainError("load balancing: preference vector length must equal actions");
        }
        for (double x : pref) {
          if (!(x > 0.0) || x > 1.0) {
            throw DomainError("load balancing: preferences must lie in (0, 1]");
          }
        }
      }
      break;
    }
    case GameFamily::AffineCongestion: {
      if (params.resource_a.size() != params.resource_b.size() || params.resource_a.empty()) {
        throw DomainError("congestion: resource_a and resource_b must be nonempty, same length");
      }
      const int m = static_cast<int>(params.resource_a.size());
      for (int e = 0; e < m; ++e) {
        if (params.resource_a[static_cast<std::size_t>(e)] < 0.0 ||
            params.resource_b[static_cast<std::size_t>(e)] < 0.0) {
          throw DomainError("congestion: coefficients must be nonnegative");
        }
      }
      if (params.action_sets.empty()) {
        if (m != d) {
          throw DomainError("congestion: parallel links need one resource per action");
        }
        for (int j = 0; j < d; ++j) params.action_sets.push_back({j});
      }
      if (static_cast<int>(params.action_sets.size()) != d) {
        throw DomainError("congestion: need one resource set per action");
      }
      double norm = 0.0;
      for (const auto& set : params.action_sets) {
        if (set.empty()) throw DomainError("congestion: empty action resource set");
        double worst = 0.0;
        for (int e : set) {
          if (e < 0 || e >= m) throw DomainError("congestion: resource index out of range");
          worst += params.resource_a[static_cast<std::size_t>(e)] * n +
                   params.resource_b[static_cast<std::size_t>(e)];
        }
        norm = std::max(norm, worst);
      }
      if (!(norm > 0.0)) {
        throw DomainError("congestion: at least one coefficient must be positive");
      }
      g.congestion_norm_ = norm;
      break;
    }
    case GameFamily::FirstPriceAuction:
    case GameFamily::AllPayAuction: {
      if (static_cast<int>(params.values.size()) != n) {
        throw DomainError("auction: need one value per player");
      }
      for (double v : params.values) {
        if (!(v > 0.0) || v > 1.0) throw DomainError("auction: values must lie in (0, 1]");
      }
      if (params.bid_grid.empty()) {
        for (int j = 0; j < d; ++j) params.bid_grid.push_back(static_cast<double>(j) / d);
      }
      if (static_cast<int>(params.bid_grid.size()) != d) {
        throw DomainError("auction: bid grid size must equal actions");
      }
      for (int j = 0; j < d; ++j) {
        const double b = params.bid_grid[static_cast<std::size_t>(j)];
        if (b < 0.0 || b > 1.0) throw DomainError("auction: bids must lie in [0, 1]");
        if (j > 0 && b <= params.bid_grid[static_cast<std::size_t>(j - 1)]) {
          throw DomainError("auction: bid grid must be strictly ascending");
        }
      }
      break;
    }
  }

  g.p_ = std::move(params);
  return g;
}

Objective Game::objective() const {
  switch (p_.family) {
    case GameFamily::LoadBalancing:
    case GameFamily::AffineCongestion:
      return Objective::CostMin;
    default:
      return Objective::UtilityMax;
  }
}

namespace {

// Highest bid wins; ties go to the lowest player index.
int auction_winner(const GameParams& p, const ActionProfile& s) {
  int winner = 0;
  double best = -1.0;
  for (int i = 0; i < p.players; ++i) {
    const double bid = p.bid_grid[static_cast<std::size_t>(s[i])];
    if (bid > best) {
      best = bid;
      winner = i;
    }
  }
  return winner;
}

}  // namespace

double Game::payoff(int player, const ActionProfile& s) const {
  check_profile(s, p_.players, p_.actions);
  if (player < 0 || player >= p_.players) throw DomainError("payoff: player out of range");
  switch (p_.family) {
    case GameFamily::LoadBalancing: {
      const int bin = s[player];
      int load = 0;
      for (int a : s.actions) load += (a == bin);
      return p_.preferences[static_cast<std::size_t>(player)][static_cast<std::size_t>(bin)] *
             load / p_.players;
    }
    case GameFamily::AffineCongestion: {
      std::vector<int> load(p_.resource_a.size(), 0);
      for (int a : s.actions) {
        for (int e : p_.action_sets[static_cast<std::size_t>(a)]) {
          ++load[static_cast<std::size_t>(e)];
        }
      }
      double total = 0.0;
      for (int e : p_.action_sets[static_cast<std::size_t>(s[player])]) {
        total += p_.resource_a[static_cast<std::size_t>(e)] * load[static_cast<std::size_t>(e)] +
                 p_.resource_b[static_cast<std::size_t>(e)];
      }
      return total / congestion_norm_;
    }
    default:
      return value_of(player, s) - payment(player, s);
  }
}

double Game::payment(int player, const ActionProfile& s) const {
  if (objective() != Objective::UtilityMax) {
    throw DomainError("payment: defined for mechanisms only");
  }
  check_profile(s, p_.players, p_.actions);
  const double bid = p_.bid_grid[static_cast<std::size_t>(s[player])];
  if (p_.family == GameFamily::AllPayAuction) return bid;
  return auction_winner(p_, s) == player ? bid : 0.0;
}

double Game::value_of(int player, const ActionProfile& s) const {
  if (objective() != Objective::UtilityMax) {
    throw DomainError("value_of: defined for mechanisms only");
  }
  check_profile(s, p_.players, p_.actions);
  return auction_winner(p_, s) == player ? p_.values[static_cast<std::size_t>(player)] : 0.0;
}

double Game::social_objective(const ActionProfile& s) const {
  check_profile(s, p_.players, p_.actions);
  double total = 0.0;
  if (objective() == Objective::CostMin) {
    for (int i = 0; i < p_.players; ++i) total += payoff(i, s);
  } else {
    for (int i = 0; i < p_.players; ++i) total += value_of(i, s);
  }
  return total;
}

std::vector<CostVector> Game::realized_cost_vectors(const ActionProfile& s) const {
  check_profile(s, p_.players, p_.actions);
  std::vector<CostVector> out;
  out.reserve(static_cast<std::size_t>(p_.players));
  ActionProfile probe = s;
  const bool cost_mode = objective() == Objective::CostMin;
  for (int i = 0; i < p_.players; ++i) {
    std::vector<double> row(static_cast<std::size_t>(p_.actions));
    const int original = probe.actions[static_cast<std::size_t>(i)];
    for (int x = 0; x < p_.actions; ++x) {
      probe.actions[static_cast<std::size_t>(i)] = x;
      row[static_cast<std::size_t>(x)] = payoff(i, probe);
    }
    probe.actions[static_cast<std::size_t>(i)] = original;
    out.push_back(cost_mode ? CostVector(std::move(row)) : CostVector::utilities(std::move(row)));
  }
  return out;
}

CostVector Game::expected_cost_vector(std::span<const ActionDistribution> dists, int player,
                                      bool force_generic) const {
  if (static_cast<int>(dists.size()) != p_.players) {
    throw DomainError("expected_cost_vector: need one distribution per player");
  }
  for (const auto& w : dists) {
    if (w.size() != p_.actions) {
      throw DomainError("expected_cost_vector: distribution dimension mismatch");
    }
  }
  if (player < 0 || player >= p_.players) {
    throw DomainError("expected_cost_vector: player out of range");
  }

  const int n = p_.players;
  const int d = p_.actions;

  if (!force_generic && p_.family == GameFamily::LoadBalancing) {
    // E[load of bin b | player on b] = 1 + sum of opponents' bin-b mass
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int b = 0; b < d; ++b) {
      double mass = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != player) mass += dists[static_cast<std::size_t>(j)][b];
      }
      row[static_cast<std::size_t>(b)] =
          p_.preferences[static_cast<std::size_t>(player)][static_cast<std::size_t>(b)] *
          (1.0 + mass) / n;
    }
    return CostVector(std::move(row));
  }

  if (!force_generic && p_.family == GameFamily::AffineCongestion) {
    // costs are linear in resource loads, so expectations push through
    const int m = static_cast<int>(p_.resource_a.size());
    std::vector<double> expected_load(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      for (int y = 0; y < d; ++y) {
        const double wy = dists[static_cast<std::size_t>(j)][y];
        if (wy == 0.0) continue;
        for (int e : p_.action_sets[static_cast<std::size_t>(y)]) {
          expected_load[static_cast<std::size_t>(e)] += wy;
        }
      }
    }
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int x = 0; x < d; ++x) {
      double total = 0.0;
      for (int e : p_.action_sets[static_cast<std::size_t>(x)]) {
        total += p_.resource_a[static_cast<std::size_t>(e)] *
                     (1.0 + expected_load[static_cast<std::size_t>(e)]) +
                 p_.resource_b[static_cast<std::size_t>(e)];
      }
      row[static_cast<std::size_t>(x)] = total / congestion_norm_;
    }
    return CostVector(std::move(row));
  }

  if (profile_count(n - 1, d) > kExpectationEnumBudget) {
    throw BudgetError("expected_cost_vector: opponent enumeration exceeds budget");
  }

  std::vector<double> row(static_cast<std::size_t>(d), 0.0);
  std::vector<int> opp(static_cast<std::size_t>(std::max(n - 1, 0)), 0);
  ActionProfile probe;
  probe.actions.assign(static_cast<std::size_t>(n), 0);
  do {
    double prob = 1.0;
    for (int j = 0, k = 0; j < n; ++j) {
      if (j == player) continue;
      const int a = opp[static_cast<std::size_t>(k++)];
      probe.actions[static_cast<std::size_t>(j)] = a;
      prob *= dists[static_cast<std::size_t>(j)][a];
    }
    if (prob > 0.0) {
      for (int x = 0; x < d; ++x) {
        probe.actions[static_cast<std::size_t>(player)] = x;
        row[static_cast<std::size_t>(x)] += prob * payoff(player, probe);
      }
    }
  } while (!opp.empty() && next_profile(opp, d));

  return objective() == Objective::CostMin ? CostVector(std::move(row))
                                           : CostVector::utilities(std::move(row));
}

Game::Opt Game::brute_force_opt() const {
  if (profile_count(p_.players, p_.actions) > kOptEnumBudget) {
    throw BudgetError("brute_force_opt: profile enumeration exceeds budget");
  }
  const bool minimize = objective() == Objective::CostMin;
  Opt best;
  best.profile.actions.assign(static_cast<std::size_t>(p_.players), 0);
  best.value = social_objective(best.profile);
  std::vector<int> s = best.profile.actions;
  while (next_profile(s, p_.actions)) {
    const double v = social_objective(ActionProfile{s});
    // strict improvement only: lexicographic iteration keeps the smallest tie
    if (minimize ? v < best.value : v > best.value) {
      best.value = v;
      best.profile.actions = s;
    }
  }
  return best;
}

SmoothnessCertificate Game::verify_smoothness(const SmoothnessParams& sp) const {
  // the checker evaluates the raw inequality, so any nonnegative pair is a
  // legal query ((0,0) is the canonical guaranteed-to-fail probe); the
  // epsilon slack only matters to the efficiency formulas downstream
  if (sp.lambda < 0.0 || sp.mu < 0.0) {
    throw DomainError("verify_smoothness: lambda and mu must be nonnegative");
  }
  const int n = p_.players;
  const int d = p_.actions;
  const double count = profile_count(n, d);
  if (count * count > kSmoothnessEnumBudget) {
    throw BudgetError("verify_smoothness: profile pair enumeration exceeds budget");
  }
  const int total = static_cast<int>(count);

  // payoff table: per profile, per player
  std::vector<std::vector<double>> table(static_cast<std::size_t>(total));
  std::vector<double> social(static_cast<std::size_t>(total), 0.0);
  std::vector<double> payments(static_cast<std::size_t>(total), 0.0);
  const bool mechanism = objective() == Objective::UtilityMax;
  {
    std::vector<int> s(static_cast<std::size_t>(n), 0);
    int idx = 0;
    do {
      const ActionProfile prof{s};
      auto& row = table[static_cast<std::size_t>(idx)];
      row.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        row[static_cast<std::size_t>(i)] = payoff(i, prof);
        if (mechanism) payments[static_cast<std::size_t>(idx)] += payment(i, prof);
      }
      social[static_cast<std::size_t>(idx)] = social_objective(prof);
      ++idx;
    } while (next_profile(s, d));
  }

  // stride of player i in the lexicographic profile index
  std::vector<int> stride(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i + 1)] * d;
  }

  auto deviation_sum = [&](const std::vector<int>& s, int idx, const std::vector<int>& star) {
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
      const int shifted = idx + (star[static_cast<std::size_t>(i)] -
                                 s[static_cast<std::size_t>(i)]) *
                                    stride[static_cast<std::size_t>(i)];
      lhs += table[static_cast<std::size_t>(shifted)][static_cast<std::size_t>(i)];
    }
    return lhs;
  };

  SmoothnessCertificate cert;
  cert.params = sp;
  constexpr double kTol = 1e-9;

  if (!mechanism) {
    // check every pair: sum_i c_i(s*_i, s_{-i}) <= lambda C(s*) + mu C(s)
    double worst = std::numeric_limits<double>::infinity();
    std::optional<std::pair<ActionProfile, ActionProfile>> witness;
    std::vector<int> s(static_cast<std::size_t>(n), 0);
    int idx = 0;
    do {
      std::vector<int> star(static_cast<std::size_t>(n), 0);
      int sidx = 0;
      do {
        const double lhs = deviation_sum(s, idx, star);
        const double rhs = sp.lambda * social[static_cast<std::size_t>(sidx)] +
                           sp.mu * social[static_cast<std::size_t>(idx)];
        const double margin = rhs - lhs;
        if (margin < worst) {
          worst = margin;
          witness = {ActionProfile{s}, ActionProfile{star}};
        }
        ++sidx;
      } while (next_profile(star, d));
      ++idx;
    } while (next_profile(s, d));
    cert.worst_margin = worst;
    cert.verified = worst >= -kTol;
    if (!cert.verified) cert.witness = witness;
    return cert;
  }

  // mechanism: find one s* whose deviations guarantee
  // sum_i u_i(s*_i, s_{-i}) >= lambda OPT - mu sum_i p_i(s) for every s
  const double opt = brute_force_opt().value;
  double best_of_worst = -std::numeric_limits<double>::infinity();
  std::optional<std::pair<ActionProfile, ActionProfile>> best_witness;
  std::vector<int> star(static_cast<std::size_t>(n), 0);
  do {
    double worst = std::numeric_limits<double>::infinity();
    ActionProfile worst_s;
    std::vector<int> s(static_cast<std::size_t>(n), 0);
    int idx = 0;
    do {
      const double lhs = deviation_sum(s, idx, star);
      const double rhs = sp.lambda * opt - sp.mu * payments[static_cast<std::size_t>(idx)];
      const double margin = lhs - rhs;
      if (margin < worst) {
        worst = margin;
        worst_s = ActionProfile{s};
      }
      ++idx;
    } while (next_profile(s, d));
    if (worst > best_of_worst) {
      best_of_worst = worst;
      best_witness = {worst_s, ActionProfile{star}};
    }
    if (worst >= -kTol) {
      cert.worst_margin = worst;
      cert.verified = true;
      return cert;
    }
  } while (next_profile(star, d));

  cert.worst_margin = best_of_worst;
  cert.verified = false;
  cert.witness = best_witness;
  return cert;
}

Game Game::with_preferences(int player, std::vector<double> prefs) const {
  if (p_.family != GameFamily::LoadBalancing) {
    throw DomainError("with_preferences: load balancing only");
  }
  if (player < 0 || player >= p_.players) {
    throw DomainError("with_preferences: player out of range");
  }
  GameParams params = p_;
  params.preferences[static_cast<std::size_t>(player)] = std::move(prefs);
  return make(std::move(params));
}

Game Game::with_value(int player, double value) const {
  if (objective() != Objective::UtilityMax) {
    throw DomainError("with_value: mechanisms only");
  }
  if (player < 0 || player >= p_.players) {
    throw DomainError("with_value: player out of range");
  }
  GameParams params = p_;
  params.values[static_cast<std::size_t>(player)] = value;
  return make(std::move(params));
}

}  // namespace lar
