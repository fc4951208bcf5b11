#include <doctest.h>

#include <cmath>
#include <vector>

#include "lar/core.hpp"
#include "lar/learners.hpp"
#include "lar/rng.hpp"

using namespace lar;

namespace {

// d=2 normalizer as a quadratic root (played = 0):
//   g^2*w0*w1 + g*(1 + tilt*w1 - 2*w0*w1) + tilt*(1 - w1) = 0
// taking the root on the correct side of zero for either tilt sign.
double gamma_closed_form_2(double w0, double w1, double tilt) {
  const double a = w0 * w1;
  const double b = 1.0 + tilt * w1 - 2.0 * w0 * w1;
  const double c = tilt * (1.0 - w1);
  return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

}  // namespace

TEST_CASE("hedge update") {
  const ActionDistribution u = ActionDistribution::uniform(2);

  SUBCASE("zero costs are a fixed point") {
    CHECK(hedge_update(u, std::vector<double>{0.0, 0.0}, 0.7) == u);
  }
  SUBCASE("symmetric costs are a fixed point") {
    const ActionDistribution w = hedge_update(u, std::vector<double>{1.0, 1.0}, 0.3);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("exact two-point value") {
    const ActionDistribution w =
        hedge_update(u, std::vector<double>{1.0, 0.0}, std::log(2.0));
    CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(hedge_update(u, std::vector<double>{1.0, 0.0, 0.0}, 0.1), DomainError);
  }
  SUBCASE("the cheapest action gains weight") {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> c(4);
      for (double& x : c) x = rng.uniform01();
      const int best = static_cast<int>(std::min_element(c.begin(), c.end()) - c.begin());
      const ActionDistribution before = ActionDistribution::uniform(4);
      const ActionDistribution after = hedge_update(before, c, 0.2);
      CHECK(after[best] > before[best]);
    }
  }
}

TEST_CASE("optimistic hedge update") {
  const ActionDistribution g = ActionDistribution::uniform(2);

  SUBCASE("zero costs") {
    const auto [gn, wn] = optimistic_hedge_update(g, std::vector<double>{0.0, 0.0}, 0.1);
    CHECK(gn == g);
    CHECK(wn == g);
  }
  SUBCASE("double tilt on the prediction") {
    const auto [gn, wn] = optimistic_hedge_update(g, std::vector<double>{1.0, 0.0}, 0.1);
    const double e1 = std::exp(-0.1);
    const double e2 = std::exp(-0.2);
    CHECK(gn[0] == doctest::Approx(e1 / (1.0 + e1)).epsilon(1e-14));
    CHECK(wn[0] == doctest::Approx(e2 / (1.0 + e2)).epsilon(1e-14));
    CHECK(wn[0] == doctest::Approx(0.4502).epsilon(1e-4));
    CHECK(wn[1] == doctest::Approx(0.5498).epsilon(1e-4));
  }
}

TEST_CASE("noisy hedge update") {
  const ActionDistribution w({0.5, 0.5});
  const std::vector<double> c{1.0, 0.0};

  SUBCASE("theta zero reduces to hedge exactly") {
    const auto [gn, wn] = noisy_hedge_update(w, c, std::log(2.0), 0.0);
    const ActionDistribution plain = hedge_update(w, c, std::log(2.0));
    CHECK(wn == plain);
    CHECK(gn == plain);
  }
  SUBCASE("theta one forces uniform") {
    const auto [gn, wn] = noisy_hedge_update(w, c, 0.4, 1.0);
    CHECK(wn == ActionDistribution::uniform(2));
    CHECK(gn[0] < 0.5);  // the auxiliary keeps the tilt
  }
  SUBCASE("mixing floors the minimum weight") {
    const ActionDistribution w4 = ActionDistribution::uniform(4);
    const auto [gn, wn] =
        noisy_hedge_update(w4, std::vector<double>{1.0, 1.0, 1.0, 0.0}, 2.5, 0.02);
    CHECK(wn.min_weight() >= 0.02 / 4.0);
  }
  SUBCASE("theta outside the unit interval") {
    CHECK_THROWS_AS(noisy_hedge_update(w, c, 0.1, 1.5), DomainError);
    CHECK_THROWS_AS(noisy_hedge_update(w, c, 0.1, -0.1), DomainError);
  }
}

TEST_CASE("tuned hedge doubling schedule") {
  LearnerConfig cfg;
  cfg.kind = LearnerKind::TunedHedge;
  cfg.d = 2;

  SUBCASE("all-ones costs trigger the first restart at round two") {
    Learner learner(cfg);
    CHECK(learner.distribution() == ActionDistribution::uniform(2));

    learner.observe(FullFeedback{CostVector({1.0, 1.0})});
    // cumulative expected cost is exactly 1, not above the 2^0 budget yet
    CHECK(learner.doubling_epoch() == 0);

    learner.observe(FullFeedback{CostVector({1.0, 1.0})});
    CHECK(learner.doubling_epoch() == 1);
    CHECK(learner.epoch_budget() == 2.0);
    CHECK(learner.distribution() == ActionDistribution::uniform(2));
  }
  SUBCASE("zero costs never restart") {
    Learner learner(cfg);
    for (int t = 0; t < 50; ++t) learner.observe(FullFeedback{CostVector({0.0, 0.0})});
    CHECK(learner.doubling_epoch() == 0);
  }
  SUBCASE("asymmetric stream restarts once the epoch cost passes one") {
    Learner learner(cfg);
    double cumulative = 0.0;
    int restart_round = -1;
    for (int t = 1; t <= 10 && restart_round < 0; ++t) {
      cumulative += learner.distribution()[0];
      learner.observe(FullFeedback{CostVector({1.0, 0.0})});
      if (learner.doubling_epoch() == 1) restart_round = t;
    }
    CHECK(restart_round > 0);
    CHECK(cumulative > 1.0);
    CHECK(learner.distribution() == ActionDistribution::uniform(2));
  }
}

TEST_CASE("importance weighted estimate") {
  const ActionDistribution w({0.25, 0.75});

  const std::vector<double> est = importance_weighted_estimate(0, 0.5, w);
  CHECK(est[0] == 2.0);
  CHECK(est[1] == 0.0);

  const std::vector<double> zero = importance_weighted_estimate(1, 0.0, w);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  CHECK_THROWS_AS(importance_weighted_estimate(0, 0.5, ActionDistribution::point_mass(2, 1)),
                  DivisionDomainError);
  CHECK_THROWS_AS(importance_weighted_estimate(5, 0.5, w), DomainError);
}

TEST_CASE("estimator unbiasedness, analytic form") {
  // summing w_played * estimate(played) over the played index recovers the
  // cost vector coordinatewise
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 2 + rng.below(6);
    std::vector<double> raw(static_cast<std::size_t>(d));
    for (double& x : raw) x = 0.05 + rng.uniform01();
    const ActionDistribution w = normalize(raw);
    std::vector<double> c(static_cast<std::size_t>(d));
    for (double& x : c) x = rng.uniform01();

    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (int p = 0; p < d; ++p) {
      const std::vector<double> est =
          importance_weighted_estimate(p, c[static_cast<std::size_t>(p)], w);
      for (int k = 0; k < d; ++k) {
        mean[static_cast<std::size_t>(k)] += w[p] * est[static_cast<std::size_t>(k)];
      }
    }
    for (int k = 0; k < d; ++k) {
      CHECK(mean[static_cast<std::size_t>(k)] ==
            doctest::Approx(c[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalizer gamma, pinned instances") {
  const ActionDistribution w({0.5, 0.5});

  SUBCASE("zero tilt is the identity") {
    CHECK(solve_normalizer_gamma(w, 0, 0.0) == 0.0);
    const ActionDistribution same = log_barrier_step(w, 0, 0.0);
    CHECK(same == w);
  }
  SUBCASE("cost side golden instance") {
    const double gamma = solve_normalizer_gamma(w, 0, 0.5);
    CHECK(gamma == doctest::Approx(-1.5 + std::sqrt(1.25)).epsilon(1e-12));
    const ActionDistribution next = log_barrier_step(w, 0, 0.5);
    CHECK(std::abs(next[0] - 0.3819660112501051) <= 1e-10);
    CHECK(std::abs(next[1] - 0.6180339887498949) <= 1e-10);
  }
  SUBCASE("utility side mirror instance") {
    const double gamma = solve_normalizer_gamma(w, 0, -0.5);
    CHECK(gamma == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
    const ActionDistribution next = log_barrier_step(w, 0, -0.5);
    CHECK(std::abs(next[0] - 0.6180339887498949) <= 1e-10);
    CHECK(std::abs(next[1] - 0.3819660112501051) <= 1e-10);
  }
  SUBCASE("tilt at or below -1 leaves the domain") {
    CHECK_THROWS_AS(solve_normalizer_gamma(w, 0, -1.0), DomainError);
    CHECK_THROWS_AS(solve_normalizer_gamma(w, 0, -1.5), DomainError);
  }
  SUBCASE("large tilt on the heaviest action") {
    // the root sits below -1/max weight here; the binding pole is the
    // played denominator (1 + tilt)/w0, so the bracket must widen to it
    const ActionDistribution skew({0.9, 0.1});
    const double gamma = solve_normalizer_gamma(skew, 0, 4.0);
    CHECK(std::abs(gamma - gamma_closed_form_2(0.9, 0.1, 4.0)) <= 1e-10);
    CHECK(gamma < -1.0 / 0.9);
    CHECK(1.0 + 4.0 + gamma * 0.9 > 0.0);
    CHECK(1.0 + gamma * 0.1 > 0.0);
  }
}

TEST_CASE("normalizer gamma, random instances") {
  Rng rng(23);
  for (int rep = 0; rep < 2000; ++rep) {
    const int d = 2 + rng.below(7);
    std::vector<double> raw(static_cast<std::size_t>(d));
    for (double& x : raw) x = 0.02 + rng.uniform01();
    const ActionDistribution w = normalize(raw);
    const int played = rng.below(d);
    const double tilt = -0.95 + 1.9 * rng.uniform01();

    const double gamma = solve_normalizer_gamma(w, played, tilt);
    if (tilt > 0.0) CHECK(gamma <= 0.0);
    if (tilt < 0.0) CHECK(gamma >= 0.0);

    const ActionDistribution next = log_barrier_step(w, played, tilt);
    double sum = 0.0;
    for (int j = 0; j < d; ++j) sum += next[j];
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("normalizer gamma matches the two-action quadratic") {
  Rng rng(29);
  for (int rep = 0; rep < 2000; ++rep) {
    const double w0 = 0.05 + 0.9 * rng.uniform01();
    const ActionDistribution w({w0, 1.0 - w0});
    const double tilt = -0.9 + 1.85 * rng.uniform01();
    const double solved = solve_normalizer_gamma(w, 0, tilt);
    const double closed = gamma_closed_form_2(w0, 1.0 - w0, tilt);
    CHECK(std::abs(solved - closed) <= 1e-10);
  }
}

TEST_CASE("learner state machine") {
  SUBCASE("hedge learner matches the free update") {
    LearnerConfig cfg;
    cfg.kind = LearnerKind::Hedge;
    cfg.d = 3;
    cfg.eta = 0.25;
    Learner learner(cfg);
    const std::vector<double> c{0.2, 0.9, 0.4};
    const ActionDistribution expect =
        hedge_update(ActionDistribution::uniform(3), c, 0.25);
    learner.observe(FullFeedback{CostVector(c)});
    CHECK(learner.distribution() == expect);
    CHECK(learner.round() == 2);

    learner.reset();
    CHECK(learner.distribution() == ActionDistribution::uniform(3));
    CHECK(learner.round() == 1);
  }
  SUBCASE("utility mode negates payoffs") {
    LearnerConfig cfg;
    cfg.kind = LearnerKind::Hedge;
    cfg.d = 2;
    cfg.eta = std::log(2.0);
    cfg.mode = PayoffMode::Utility;
    Learner learner(cfg);
    learner.observe(FullFeedback{CostVector::utilities({1.0, 0.0})});
    // the high-payoff action gains the 2/3 share
    CHECK(learner.distribution()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("noisy hedge defaults theta to one over the horizon") {
    LearnerConfig by_default;
    by_default.kind = LearnerKind::NoisyHedge;
    by_default.d = 2;
    by_default.eta = 0.3;
    by_default.horizon_t = 100;
    LearnerConfig explicit_theta = by_default;
    explicit_theta.theta = 0.01;

    Learner a(by_default), b(explicit_theta);
    for (int t = 0; t < 5; ++t) {
      a.observe(FullFeedback{CostVector({1.0, 0.0})});
      b.observe(FullFeedback{CostVector({1.0, 0.0})});
    }
    CHECK(a.distribution() == b.distribution());
    CHECK(a.distribution().min_weight() >= 0.01 / 2.0);
  }
  SUBCASE("bandit learner chains the estimator into the barrier step") {
    LearnerConfig cfg;
    cfg.kind = LearnerKind::LogBarrierBandit;
    cfg.d = 2;
    cfg.eta = 0.5;
    Learner learner(cfg);
    learner.observe(BanditFeedback{0, 0.5});
    // tilt = eta * observed = 0.25; gamma from the quadratic
    const double gamma = gamma_closed_form_2(0.5, 0.5, 0.25);
    CHECK(learner.distribution()[0] == doctest::Approx(0.5 / (1.25 + gamma * 0.5)).epsilon(1e-10));
    CHECK(learner.distribution()[1] == doctest::Approx(0.5 / (1.0 + gamma * 0.5)).epsilon(1e-10));
  }
  SUBCASE("bandit learner with zero observation keeps its distribution") {
    LearnerConfig cfg;
    cfg.kind = LearnerKind::LogBarrierBandit;
    cfg.d = 3;
    cfg.eta = 0.2;
    Learner learner(cfg);
    learner.observe(BanditFeedback{1, 0.0});
    CHECK(learner.distribution() == ActionDistribution::uniform(3));
  }
  SUBCASE("bandit observations are range checked") {
    LearnerConfig cfg;
    cfg.kind = LearnerKind::LogBarrierBandit;
    cfg.d = 2;
    cfg.eta = 0.2;
    Learner learner(cfg);
    CHECK_THROWS_AS(learner.observe(BanditFeedback{0, -0.1}), DomainError);
    CHECK_THROWS_AS(learner.observe(BanditFeedback{0, 1.1}), DomainError);
  }
}

TEST_CASE("learner config validation") {
  LearnerConfig cfg;
  cfg.d = 2;

  cfg.kind = LearnerKind::Hedge;
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);

  cfg.kind = LearnerKind::OptimisticHedge;
  cfg.eta = 0.25;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.eta = 0.2;
  CHECK_NOTHROW(cfg.validate());

  cfg.kind = LearnerKind::LogBarrierBandit;
  cfg.eta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.eta = 0.9;
  CHECK_NOTHROW(cfg.validate());

  cfg.kind = LearnerKind::NoisyHedge;
  cfg.eta = 0.1;
  cfg.theta = -1.0;
  cfg.horizon_t = 0;  // no horizon to derive the default from
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.horizon_t = 10;
  CHECK_NOTHROW(cfg.validate());
  cfg.theta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("apply mode") {
  const std::vector<double> u{1.0, 0.0, 0.5};
  const std::vector<double> cost = apply_mode(u, PayoffMode::Cost);
  CHECK(cost == u);
  const std::vector<double> util = apply_mode(u, PayoffMode::Utility);
  CHECK(util[0] == -1.0);
  CHECK(util[1] == 0.0);
  CHECK(util[2] == -0.5);
}
