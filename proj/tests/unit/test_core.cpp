#include <doctest.h>

#include <cmath>
#include <vector>

#include "lar/core.hpp"

using namespace lar;

TEST_CASE("action distribution construction") {
  const ActionDistribution u = ActionDistribution::uniform(4);
  CHECK(u.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(u[j] == 0.25);

  const ActionDistribution p = ActionDistribution::point_mass(3, 1);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
  CHECK(p.min_weight() == 0.0);
  CHECK(p.max_weight() == 1.0);

  CHECK_THROWS_AS(ActionDistribution::uniform(0), DomainError);
  CHECK_THROWS_AS(ActionDistribution::point_mass(3, 3), DomainError);
  CHECK_THROWS_AS(ActionDistribution({0.7, -0.1, 0.4}), DomainError);
  CHECK_THROWS_AS(ActionDistribution({0.4, 0.4}), DomainError);
  CHECK_THROWS_AS(ActionDistribution(std::vector<double>{}), DomainError);
}

TEST_CASE("simplex tolerance is an absolute gate on the mass") {
  CHECK_NOTHROW(ActionDistribution({0.5, 0.5 + 5e-10}));
  CHECK_THROWS_AS(ActionDistribution({0.5, 0.5 + 5e-9}), DomainError);
}

TEST_CASE("cost vector ranges") {
  CHECK_NOTHROW(CostVector({0.0, 1.0, 0.5}));
  CHECK_THROWS_AS(CostVector({-0.1, 0.5}), DomainError);
  CHECK_THROWS_AS(CostVector({0.1, 1.5}), DomainError);
  CHECK_THROWS_AS(CostVector(std::vector<double>{}), DomainError);

  CHECK_NOTHROW(CostVector::utilities({-1.0, 1.0, 0.0}));
  CHECK_THROWS_AS(CostVector::utilities({-1.2, 0.0}), DomainError);
  CHECK_THROWS_AS(CostVector::utilities({0.0, 1.2}), DomainError);
}

TEST_CASE("normalize") {
  const ActionDistribution w = normalize(std::vector<double>{2.0, 2.0});
  CHECK(w[0] == 0.5);
  CHECK(w[1] == 0.5);

  const ActionDistribution v = normalize(std::vector<double>{3.0, 1.0});
  CHECK(v[0] == doctest::Approx(0.75));

  CHECK_THROWS_AS(normalize(std::vector<double>{0.0, 0.0}), ZeroMassError);
  CHECK_THROWS_AS(normalize(std::vector<double>{1.0, -1.0}), DomainError);
}

TEST_CASE("mix with uniform") {
  const ActionDistribution w({0.9, 0.1});

  const ActionDistribution same = mix_with_uniform(w, 0.0);
  CHECK(same == w);

  const ActionDistribution half = mix_with_uniform(w, 0.5);
  CHECK(half[0] == doctest::Approx(0.7));
  CHECK(half[1] == doctest::Approx(0.3));

  const ActionDistribution full = mix_with_uniform(w, 1.0);
  CHECK(full == ActionDistribution::uniform(2));

  CHECK_THROWS_AS(mix_with_uniform(w, -0.01), DomainError);
  CHECK_THROWS_AS(mix_with_uniform(w, 1.01), DomainError);
}

TEST_CASE("mixing a uniform distribution is an exact fixed point") {
  // w + theta*(1/d - w) leaves every coordinate bitwise untouched at uniform
  const ActionDistribution u = ActionDistribution::uniform(3);
  for (double theta : {0.0, 0.02, 0.37, 1.0}) {
    const ActionDistribution mixed = mix_with_uniform(u, theta);
    for (int j = 0; j < 3; ++j) CHECK(mixed[j] == u[j]);
  }
}

TEST_CASE("expected value") {
  const ActionDistribution w({0.25, 0.75});
  CHECK(expected_value(w, CostVector({1.0, 0.0})) == 0.25);
  CHECK(expected_value(w, CostVector({0.4, 0.4})) == doctest::Approx(0.4));
  CHECK_THROWS_AS(expected_value(w, CostVector({1.0, 0.0, 0.0})), DomainError);
}

TEST_CASE("smoothness parameter validation") {
  CHECK_NOTHROW(validate_smoothness_params({5.0 / 3.0, 1.0 / 3.0, 0.1}));
  CHECK_NOTHROW(validate_smoothness_params({5.0 / 3.0, 1.0 / 3.0, 0.0}));
  // cost bounds need mu + epsilon < 1
  CHECK_THROWS_AS(validate_smoothness_params({5.0 / 3.0, 1.0 / 3.0, 0.7}), DomainError);
  CHECK_THROWS_AS(validate_smoothness_params({1.0, 1.0, 0.0}), DomainError);
  // the mechanism form allows mu >= 1
  CHECK_NOTHROW(validate_smoothness_params({1.0 - std::exp(-1.0), 1.0, 0.1}, true));
  CHECK_THROWS_AS(validate_smoothness_params({0.0, 0.5, 0.1}), DomainError);
  CHECK_THROWS_AS(validate_smoothness_params({1.0, -0.1, 0.1}), DomainError);
  CHECK_THROWS_AS(validate_smoothness_params({1.0, 0.1, -0.1}), DomainError);
}

TEST_CASE("lar parameter validation") {
  LarParams p{0.1, 2.0, false, 0.0};
  CHECK_NOTHROW(p.validate());

  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.epsilon = 0.1;

  p.a_of_dt = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.a_of_dt = 2.0;

  p.shift_count_k = 3.0;
  CHECK_THROWS_AS(p.validate(), DomainError);  // fixed comparator, no shifts
  p.shifting = true;
  CHECK_NOTHROW(p.validate());
  p.shift_count_k = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}
