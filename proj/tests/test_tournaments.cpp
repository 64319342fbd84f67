#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cm/tournaments.hpp"

using namespace cm;
using namespace cm::tour;

TEST_CASE("asymptotic formula") {
  CHECK(rt_asymptotic(3) == doctest::Approx(16 / (3 * std::numbers::pi) * std::sqrt(3.0) * std::exp(-0.5)));
  CHECK(rt_asymptotic(3) == doctest::Approx(1.782).epsilon(1e-3));
  // (2^8 / (7 pi))^3 sqrt(7) e^{-1/2}
  const double r7 = std::pow(256 / (7 * std::numbers::pi), 3) * std::sqrt(7.0) * std::exp(-0.5);
  CHECK(rt_asymptotic(7) == doctest::Approx(r7).epsilon(1e-13));
  CHECK(rt_asymptotic(7) == doctest::Approx(2531.5).epsilon(1e-4));
  CHECK(rt_asymptotic(9) == doctest::Approx(3.1304e6).epsilon(1e-4));
  CHECK_THROWS_AS(rt_asymptotic(8), PreconditionError);
  CHECK_THROWS_AS(rt_asymptotic(1), PreconditionError);
}

TEST_CASE("exact counts") {
  CHECK(rt_exact(1) == 1);
  CHECK(rt_exact(3) == 2);
  CHECK(rt_exact(5) == 24);
  CHECK(rt_exact(7) == 2640);
  CHECK(rt_exact(9) == 3230080);
  CHECK(rt_exact(11) == BigInt("48251508480"));
  CHECK_THROWS_AS(rt_exact(6), PreconditionError);
  CHECK_THROWS_AS(rt_exact(15, 5), BudgetExceeded);
}

TEST_CASE("recursion agrees with brute force") {
  for (int n : {1, 3, 5, 7}) CHECK(BigInt(rt_brute_force(n)) == rt_exact(n));
  CHECK(rt_brute_force(7, 3) == 2640);  // sharding does not change the sum
  CHECK_THROWS_AS(rt_brute_force(9), PreconditionError);
}

TEST_CASE("ratio improves with n") {
  double prev = 0;
  for (int n : {5, 7, 9, 11}) {
    const auto c = tournament_count(n, true);
    REQUIRE(c.ratio);
    CHECK(*c.ratio > prev);
    CHECK(*c.ratio < 1.0);
    prev = *c.ratio;
  }
  CHECK(std::abs(*tournament_count(7, true).ratio - 1) <= 0.1);
  CHECK(*tournament_count(7, true).ratio == doctest::Approx(0.959).epsilon(1e-3));
  CHECK_FALSE(tournament_count(7, false).exact.has_value());
}
