#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pulsefront/diagnostics.hpp"
#include "pulsefront/eigen.hpp"
#include "pulsefront/frontsolve.hpp"

using namespace pulsefront;
using namespace pulsefront::testing;

namespace {

// Flat strip, f = 0: the front is T_0^{c_*} with zero flow.
FrontSolution planar(int n_s, int n_xz, double a, double eps) {
  auto cell = build_period_cell(flat_geometry(n_s, n_xz, n_xz, a));
  ReactionSpec spec;
  spec.kappa = 0.0;
  SolverConfig cfg;
  cfg.eps = eps;
  cfg.buoyancy = 0.0;
  return fixed_point_solve(cfg, spec, cell);
}

ReactionSpec zero_reaction() {
  ReactionSpec spec;
  spec.kappa = 0.0;
  return spec;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("decay fit recovers a synthetic exponential rate") {
    auto cell = build_period_cell(flat_geometry(64, 4, 4, 8.0));
    GridField T(cell, BcTag::temperature);
    T.fill_physical([](double s, double x, double z) {
      return 0.2 + std::exp(-0.3 * s) * (1.0 + 0.1 * std::cos(6.0 * x) * z) * 0.5;
    });
    const DecayFit f = decay_fit(T);
    CHECK(f.slope == doctest::Approx(-0.3).epsilon(1e-6));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.R == 1.0);
    CHECK(f.R_end == 7.0);
    CHECK(f.samples == 24);
  }

  TEST_CASE("planar tail decays at c / (1 + eps)") {
    const double eps = 0.02;
    const FrontSolution s = planar(128, 4, 8.0, eps);
    CHECK(s.c == doctest::Approx(c_star(0.25, 8.0, eps)).epsilon(1e-8));
    const DecayFit f = decay_fit(s.T, &s.u1, &s.u2);
    CHECK(f.slope == doctest::Approx(-s.c / (1.0 + eps)).epsilon(1e-8));
    CHECK(f.u_window <= 1e-12);
  }

  TEST_CASE("planar identities") {
    // Both identities hold exactly for the continuous front; the residual is
    // quadrature error and falls at second order.
    const double eps = 0.02;
    const ReactionSpec spec = zero_reaction();
    std::vector<double> rr, er;
    for (int n_s : {1024, 4096}) {
      const FrontSolution s = planar(n_s, 4, 8.0, eps);
      rr.push_back(reaction_rate_residual(s, spec));
      er.push_back(energy_identity_residual(s, spec));
      MESSAGE("n_s = " << n_s << ": reaction " << rr.back() << ", energy " << er.back());
      CHECK(burning_product(s, spec) == 0.0);
      const DiagnosticsReport r = diagnose(s, spec);
      CHECK_FALSE(r.any_failed());
      REQUIRE(r.find("theta_plus") != nullptr);
      CHECK(r.find("theta_plus")->verdict == Verdict::info);
    }
    CHECK(rr[1] <= 1e-6);
    CHECK(er[1] <= 1e-6);
    CHECK(std::log2(er[0] / er[1]) == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("c^2 / eps series") {
    const auto v = c2_over_eps({0.08, 0.04, 0.02}, {0.4, 0.3, 0.25});
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(2.0));
    CHECK(v[1] == doctest::Approx(2.25));
    CHECK(v[2] == doctest::Approx(3.125));
    CHECK(c2_over_eps_ok(v));
    CHECK_FALSE(c2_over_eps_ok({3.0, 2.0, 1.0}));
    CHECK_FALSE(c2_over_eps_ok({1.0, -1.0}));
    CHECK_FALSE(c2_over_eps_ok({}));
  }

  TEST_CASE("wavy front on a coarse grid") {
    auto cell = build_period_cell(wavy_geometry(64, 8, 8, 8.0));
    ReactionSpec spec;
    SolverConfig cfg;
    const FrontSolution s = fixed_point_solve(cfg, spec, cell);
    const DiagnosticsReport r = diagnose(s, spec);
    CHECK_FALSE(r.any_failed());
    CHECK(r.reaction_rate_residual <= 1e-2);
    CHECK(r.energy_residual <= 2e-2);
    CHECK(r.speed_bound.ratio < 1.0);
    CHECK(r.speed_bound.min_psi > 0.0);
    CHECK(r.normalization_error <= 1e-8);
    CHECK(r.theta_minus > 0.0);
    CHECK(r.theta_minus <= 1.0);

    SUBCASE("pulsating entry") {
      DiagnosticsReport q = r;
      attach_pulsating(q, 0.01);
      CHECK_FALSE(q.any_failed());
      attach_pulsating(q, 0.2);
      CHECK(q.any_failed());
    }
  }
}
