#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/geometry.hpp"

using namespace pulsefront;
using namespace pulsefront::testing;

TEST_SUITE("geometry") {
  TEST_CASE("flat strip has axis normals and trivial metric") {
    const PeriodCell c(flat_geometry(16, 8, 8, 2.0));
    for (int j = 0; j < c.n_x(); ++j) {
      const auto nb = c.normal(j, Wall::bottom), nt = c.normal(j, Wall::top);
      CHECK(nb[0] == 0.0);
      CHECK(nb[1] == -1.0);
      CHECK(nt[0] == 0.0);
      CHECK(nt[1] == 1.0);
      for (int k = 0; k <= c.n_z(); ++k) {
        CHECK(c.metric(j, k).jacobian == 1.0);
        CHECK(c.metric(j, k).sigma_x == 0.0);
        CHECK(c.metric(j, k).sigma_x_xi == 0.0);
        CHECK(c.metric(j, k).sigma_x_sigma == 0.0);
      }
    }
    CHECK(c.is_flat());
    CHECK(cell_measure(c) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("wavy normals are unit and outward") {
    const PeriodCell c(wavy_geometry(16, 32, 8, 2.0));
    CHECK_FALSE(c.is_flat());
    for (int j = 0; j < c.n_x(); ++j) {
      const double x = c.x_node(j);
      for (Wall w : {Wall::bottom, Wall::top}) {
        const auto n = c.normal(j, w);
        CHECK(std::abs(std::hypot(n[0], n[1]) - 1.0) <= 1e-12);
        // Independent slope from the wall formulas.
        const double slope = w == Wall::bottom ? -0.05 * 2 * std::numbers::pi * std::sin(2 * std::numbers::pi * x)
                                               : 0.1 * 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * x);
        const double sgn = w == Wall::bottom ? -1.0 : 1.0;
        const double len = std::sqrt(1.0 + slope * slope);
        CHECK(n[0] == doctest::Approx(-sgn * slope / len).epsilon(1e-12));
        CHECK(n[1] == doctest::Approx(sgn / len).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("cell measure integrates the wall profiles") {
    // The trapezoid rule is exact for a single Fourier mode on a full period.
    const PeriodCell c(wavy_geometry(16, 16, 8, 2.0));
    CHECK(cell_measure(c) == doctest::Approx(1.0).epsilon(1e-14));
    GeometryConfig g = flat_geometry(16, 8, 4, 4.0);
    g.ell = 2.0;
    g.half_width = 4.0;
    g.top = WallProfile::flat(3.0);
    g.bottom = WallProfile::flat(1.0);
    CHECK(cell_measure(PeriodCell(g)) == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("boundary classes partition the nodes") {
    const PeriodCell c(flat_geometry(8, 4, 4, 2.0));
    CHECK(c.classify(0, 2, 2) == BoundaryClass::s_left);
    CHECK(c.classify(8, 2, 2) == BoundaryClass::s_right);
    CHECK(c.classify(3, 2, 0) == BoundaryClass::b_wall);
    CHECK(c.classify(3, 2, 4) == BoundaryClass::b_wall);
    CHECK(c.classify(3, 0, 2) == BoundaryClass::p_periodic);
    CHECK(c.classify(3, 1, 2) == BoundaryClass::interior);
    CHECK(c.wrap(-1) == 3);
    CHECK(c.wrap(4) == 0);
  }

  TEST_CASE("fourier walls are periodic under whole-period shifts") {
    const WallProfile a = WallProfile::fourier(0.3, {0.1, 0.02}, {0.05}, 1.5);
    const WallProfile b = WallProfile::fourier(0.3, {0.1, 0.02}, {0.05}, 1.5, 3.0);
    for (double x : {0.0, 0.2, 0.7, 1.3}) {
      CHECK(a.value(x) == doctest::Approx(b.value(x)).epsilon(1e-15));
      CHECK(a.value(x) == doctest::Approx(a.value(x + 1.5)).epsilon(1e-14));
    }
  }

  TEST_CASE("overlapping walls are rejected") {
    GeometryConfig g = flat_geometry(8, 8, 4, 2.0);
    g.top = WallProfile::fourier(0.05, {}, {0.1}, 1.0);
    CHECK_THROWS_AS(PeriodCell{g}, ConfigError);
  }
}
