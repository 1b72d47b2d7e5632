#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "pulsefront/fields.hpp"

using namespace pulsefront;
using namespace pulsefront::testing;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_interior(const GridField& g, int margin = 1) {
  const PeriodCell& c = g.cell();
  double m = 0.0;
  for (int i = margin; i <= c.n_s() - margin; ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = margin; k <= c.n_z() - margin; ++k) m = std::max(m, std::abs(g(i, j, k)));
  return m;
}

}  // namespace

TEST_SUITE("fields") {
  TEST_CASE("L_eps of s^2 is 2 + 2 eps everywhere") {
    for (auto geo : {flat_geometry(16, 8, 8, 2.0), wavy_geometry(16, 8, 8, 2.0)}) {
      auto cell = build_period_cell(geo);
      GridField g(cell, BcTag::temperature);
      g.fill_physical([](double s, double, double) { return s * s; });
      const double eps = 0.1;
      const GridField L = apply_L_epsilon(g, eps);
      for (double v : L.values()) CHECK(v == doctest::Approx(2.0 + 2.0 * eps).epsilon(1e-10));
    }
  }

  TEST_CASE("tilde gradient of sin(2 pi (x + s)) converges at second order") {
    double prev = 0.0;
    for (int n : {8, 16, 32}) {
      auto cell = build_period_cell(wavy_geometry(4 * n, n, n, 2.0));
      GridField g(cell, BcTag::temperature);
      g.fill_physical([](double s, double x, double) { return std::sin(2 * kPi * (x + s)); });
      GridField exact(cell, BcTag::temperature);
      exact.fill_physical([](double s, double x, double) { return 4 * kPi * std::cos(2 * kPi * (x + s)); });
      const auto gr = tilde_gradient(g);
      const double err = max_abs_interior(gr[0].like(gr[0].values() - exact.values()));
      CHECK(max_abs_interior(gr[1]) <= 1e-10);
      if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
      prev = err;
    }
  }

  TEST_CASE("discrete integration by parts on the flat strip") {
    // With zero data on the ends and walls,
    //   sum g L g = -sum [(1+eps)(d+_s g)^2 + 2 (d0_s g)(d0_x g) + (d+_x g)^2 + (d+_z g)^2]
    // for the centered stencil; an exact identity up to rounding.
    auto cell = build_period_cell(flat_geometry(16, 8, 6, 2.0));
    const PeriodCell& c = *cell;
    GridField g(cell, BcTag::stream);
    unsigned state = 12345u;
    auto rnd = [&] {
      state = state * 1664525u + 1013904223u;
      return static_cast<double>(state >> 8) / 16777216.0 - 0.5;
    };
    for (int i = 1; i < c.n_s(); ++i)
      for (int j = 0; j < c.n_x(); ++j)
        for (int k = 1; k < c.n_z(); ++k) g(i, j, k) = rnd();
    const double eps = 0.07;
    const GridField L = apply_L_epsilon(g, eps);
    const double hs = c.h_s(), hx = c.h_x(), hz = c.h_sigma();
    double lhs = 0.0, form = 0.0, g2 = 0.0;
    for (int i = 0; i <= c.n_s(); ++i)
      for (int j = 0; j < c.n_x(); ++j)
        for (int k = 0; k <= c.n_z(); ++k) {
          lhs += g(i, j, k) * L(i, j, k);
          g2 += g(i, j, k) * g(i, j, k);
          if (i < c.n_s()) form += (1 + eps) * std::pow((g(i + 1, j, k) - g(i, j, k)) / hs, 2);
          if (k < c.n_z()) form += std::pow((g(i, j, k + 1) - g(i, j, k)) / hz, 2);
          form += std::pow((g(i, j + 1, k) - g(i, j, k)) / hx, 2);
          if (i > 0 && i < c.n_s())
            form += 2.0 * (g(i + 1, j, k) - g(i - 1, j, k)) / (2 * hs) *
                    (g(i, j + 1, k) - g(i, j - 1, k)) / (2 * hx);
        }
    CHECK(std::abs(lhs + form) <= 1e-10 * g2 / (hs * hs));
  }

  TEST_CASE("separable mollifier matches brute-force convolution") {
    for (auto geo : {flat_geometry(24, 8, 8, 3.0), wavy_geometry(24, 8, 8, 3.0)}) {
      auto cell = build_period_cell(geo);
      for (BcTag tag : {BcTag::temperature, BcTag::vorticity}) {
        GridField g(cell, tag);
        g.fill_physical([](double s, double x, double z) {
          return std::exp(-0.3 * s * s) * (1 + 0.3 * std::sin(2 * kPi * x)) * (z + 0.2) + 0.1 * s;
        });
        const MollifierSpec m{0.4, 0.0};
        const GridField a = mollify(g, m), b = mollify_direct(g, m);
        CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }

  TEST_CASE("a unit spike is replaced by the kernel") {
    auto cell = build_period_cell(flat_geometry(40, 16, 16, 5.0));
    const PeriodCell& c = *cell;
    GridField g(cell, BcTag::vorticity);
    const int i0 = 20, j0 = 5, k0 = 8;
    g(i0, j0, k0) = 1.0;
    const double delta = 0.3;
    const GridField m = mollify(g, {delta, 0.0});
    const auto ws = bump_weights(delta, c.h_s()), wx = bump_weights(delta, c.h_x()),
               wz = bump_weights(delta, c.h_sigma());
    const int ms = static_cast<int>(ws.size() / 2), mx = static_cast<int>(wx.size() / 2),
              mz = static_cast<int>(wz.size() / 2);
    double total = 0.0;
    for (double v : m.values()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    for (int a = -ms; a <= ms; ++a)
      for (int b = -mx; b <= mx; ++b)
        for (int q = -mz; q <= mz; ++q)
          CHECK(m(i0 + a, j0 + b, k0 + q) ==
                doctest::Approx(ws[a + ms] * wx[b + mx] * wz[q + mz]).epsilon(1e-13));
  }

  TEST_CASE("bump weights are symmetric with unit mass") {
    const auto w = bump_weights(0.5, 0.1);
    CHECK(w.size() == 9);
    double sum = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) {
      sum += w[q];
      CHECK(w[q] == doctest::Approx(w[w.size() - 1 - q]).epsilon(1e-15));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bump_weights(0.0, 0.1).size() == 1);
  }

  TEST_CASE("odd reflection about the end values") {
    auto cell = build_period_cell(flat_geometry(16, 4, 4, 2.0));
    GridField g(cell, BcTag::temperature);
    g.fill_physical([](double s, double x, double) { return std::exp(s) + x; });
    const GridField e = extend_by_reflection(g, 1.0);
    const PeriodCell& ec = e.cell();
    CHECK(ec.n_s() == 24);
    CHECK(ec.a() == doctest::Approx(3.0));
    for (int r = 0; r <= 4; ++r)
      for (int j = 0; j < 4; ++j) {
        CHECK(e(4 - r, j, 2) == doctest::Approx(2 * g(0, j, 2) - g(r, j, 2)).epsilon(1e-15));
        CHECK(e(20 + r, j, 2) == doctest::Approx(2 * g(16, j, 2) - g(16 - r, j, 2)).epsilon(1e-15));
      }
    const GridField back = restrict_to(e, cell);
    CHECK((back.values() - g.values()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("integrals and norms of constants") {
    auto cell = build_period_cell(wavy_geometry(16, 16, 8, 2.0));
    GridField one(cell, BcTag::temperature, 0.0, 1.0);
    CHECK(integrate(one) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(integrate_section(one, 3) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(norm(one, NormKind::L2) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(norm(one, NormKind::H1_tilde) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("right-half maximum") {
    auto cell = build_period_cell(flat_geometry(16, 4, 4, 2.0));
    GridField g(cell, BcTag::temperature);
    g.fill_physical([](double s, double, double) { return -s; });
    const auto [v, idx] = max_right_half(g);
    CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(idx == g.index(8, 0, 0));
  }
}
