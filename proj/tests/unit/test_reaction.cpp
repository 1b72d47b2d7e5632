#include <doctest.h>

#include <cmath>

#include "pulsefront/errors.hpp"
#include "pulsefront/reaction.hpp"

using namespace pulsefront;

TEST_SUITE("reaction") {
  TEST_CASE("cubic ignition values") {
    ReactionSpec r;  // theta0 = 0.25, kappa = 10, A = 0.5
    CHECK(evaluate(r, 0.0, 0.3, 0.5) == doctest::Approx(10 * 0.015625 * 0.5).epsilon(1e-15));
    CHECK(evaluate(r, 0.25, 0.3, 0.5) == doctest::Approx(1.5 * 0.078125).epsilon(1e-14));
    CHECK(evaluate(r, 0.75, 0.3, 0.5) == doctest::Approx(0.5 * 0.078125).epsilon(1e-14));
    CHECK(evaluate(r, 0.1, 0.3, 0.2) == 0.0);
    CHECK(evaluate(r, 0.1, 0.3, 0.25) == 0.0);
    CHECK(evaluate(r, 0.1, 0.3, 1.0) == 0.0);
    CHECK(evaluate(r, 0.1, 0.3, 1.2) <= 0.0);
  }

  TEST_CASE("smallness family") {
    ReactionSpec r;
    r.profile = ReactionProfile::smallness;
    r.power = 3.0;
    r.c_omega = 2.0;
    CHECK(evaluate(r, 0.3, 0.0, 0.5) == doctest::Approx(2.0 * 0.015625 * 0.5).epsilon(1e-15));
    CHECK(evaluate(r, 0.3, 0.0, 1.1) == 0.0);
    // f <= C (T - theta0)_+^p pointwise.
    for (double T = 0.0; T <= 1.0; T += 0.01)
      CHECK(evaluate(r, 0.0, 0.0, T) <= 2.0 * std::pow(std::max(T - 0.25, 0.0), 3.0) + 1e-15);
  }

  TEST_CASE("derivative matches a centered difference") {
    ReactionSpec r;
    for (double T : {0.3, 0.5, 0.8, 0.95}) {
      const double h = 1e-6;
      const double fd = (evaluate(r, 0.2, 0.0, T + h) - evaluate(r, 0.2, 0.0, T - h)) / (2 * h);
      CHECK(evaluate_dT(r, 0.2, 0.0, T) == doctest::Approx(fd).epsilon(1e-7));
    }
  }

  TEST_CASE("lipschitz slope against the analytic maximiser") {
    // d/dT log[(T - t0)^3 (1 - T) / T] = 0  gives  T* = (1 + sqrt(1 + 3 t0)) / 3.
    ReactionSpec r;
    const double t0 = r.theta0;
    const double Ts = (1.0 + std::sqrt(1.0 + 3.0 * t0)) / 3.0;
    const double oracle = (1.0 + r.amplitude) * r.kappa * std::pow(Ts - t0, 3) * (1 - Ts) / Ts;
    const double M = lipschitz_slope(r, {0.0, 0.25, 0.5, 0.75});
    CHECK(M == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(M <= oracle * (1 + 1e-12));
  }

  TEST_CASE("validation") {
    ReactionSpec r;
    CHECK_NOTHROW(r.validate());
    CHECK(sampled_floor(r, {0.0, 0.5}) >= r.c_floor);
    r.theta0 = 1.2;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r = ReactionSpec{};
    r.r1 = 0.1;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r = ReactionSpec{};
    r.amplitude = 1.0;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r = ReactionSpec{};
    r.kappa = 0.0;
    CHECK(r.vanishes());
    CHECK(evaluate(r, 0.0, 0.0, 0.6) == 0.0);
  }

  TEST_CASE("profile names round-trip") {
    for (ReactionProfile p : {ReactionProfile::cubic_ignition, ReactionProfile::smallness})
      CHECK(reaction_profile_from_string(to_string(p)) == p);
    CHECK_THROWS_AS(reaction_profile_from_string("kpp"), ConfigError);
  }
}
