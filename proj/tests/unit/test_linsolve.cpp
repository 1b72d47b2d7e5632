#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/linsolve.hpp"

using namespace pulsefront;
using namespace pulsefront::testing;

namespace {

/// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t piv = p;
    for (std::size_t r = p + 1; r < n; ++r)
      if (std::abs(A[r][p]) > std::abs(A[piv][p])) piv = r;
    std::swap(A[p], A[piv]);
    std::swap(b[p], b[piv]);
    for (std::size_t r = p + 1; r < n; ++r) {
      const double f = A[r][p] / A[p][p];
      for (std::size_t q = p; q < n; ++q) A[r][q] -= f * A[p][q];
      b[r] -= f * b[p];
    }
  }
  std::vector<double> x(n);
  for (std::size_t p = n; p-- > 0;) {
    double acc = b[p];
    for (std::size_t q = p + 1; q < n; ++q) acc -= A[p][q] * x[q];
    x[p] = acc / A[p][p];
  }
  return x;
}

}  // namespace

TEST_SUITE("linsolve") {
  TEST_CASE("identity system returns the right-hand side") {
    Eigen::SparseMatrix<double> I(5, 5);
    I.setIdentity();
    Eigen::VectorXd b(5);
    b << 1, -2, 3, 0.5, 7;
    for (SolveMethod m : {SolveMethod::direct, SolveMethod::bicgstab}) {
      SolveOptions o;
      o.method = m;
      CHECK((solve(I, b, o) - b).norm() <= 1e-14);
    }
  }

  TEST_CASE("assembled operator against dense elimination") {
    auto cell = build_period_cell(wavy_geometry(8, 4, 4, 2.0));
    GridField u1(cell, BcTag::velocity_component), u2(cell, BcTag::velocity_component);
    u1.fill_physical([](double s, double, double z) { return 0.3 * std::sin(s) * z; });
    u2.fill_physical([](double, double x, double) { return 0.2 * std::cos(6.0 * x); });
    Eigen::VectorXd r = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(u1.size()), 0.4);
    OperatorSpec op;
    op.eps = 0.05;
    op.drift = 0.7;
    op.u1 = &u1;
    op.u2 = &u2;
    op.reaction = &r;
    BoundarySpec bc;
    bc.walls = WallCondition::conormal;
    bc.left = 1.0;
    const LinearSystem sys = assemble(op, bc, cell);
    const auto n = static_cast<std::size_t>(sys.unknowns());
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    const Eigen::MatrixXd Ad = Eigen::MatrixXd(sys.A);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        dense[p][q] = Ad(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    std::vector<double> b(sys.b.data(), sys.b.data() + n);
    const auto ref = dense_solve(dense, b);
    for (SolveMethod m : {SolveMethod::direct, SolveMethod::bicgstab}) {
      SolveOptions o;
      o.method = m;
      ConvergenceRecord rec;
      const Eigen::VectorXd x = solve(sys, o, &rec);
      CHECK(rec.converged);
      double err = 0.0;
      for (std::size_t p = 0; p < n; ++p) err = std::max(err, std::abs(x[static_cast<Eigen::Index>(p)] - ref[p]));
      CHECK(err <= 1e-8);
    }
  }

  TEST_CASE("factor once, solve many") {
    Eigen::SparseMatrix<double> A(3, 3);
    A.insert(0, 0) = 4;
    A.insert(0, 1) = 1;
    A.insert(1, 0) = 1;
    A.insert(1, 1) = 3;
    A.insert(2, 2) = 2;
    A.makeCompressed();
    LinearSolver s;
    s.compute(A, {});
    Eigen::VectorXd b1(3), b2(3);
    b1 << 1, 2, 3;
    b2 << -1, 0, 4;
    CHECK((A * s.solve(b1) - b1).norm() <= 1e-14);
    CHECK((A * s.solve(b2) - b2).norm() <= 1e-14);
  }

  TEST_CASE("singular systems are reported") {
    Eigen::SparseMatrix<double> A(2, 2);
    A.insert(0, 0) = 1;
    A.insert(1, 0) = 1;
    A.makeCompressed();
    Eigen::VectorXd b(2);
    b << 1, 2;
    SolveOptions o;
    o.method = SolveMethod::direct;
    CHECK_THROWS_AS(solve(A, b, o), SolverError);
  }

  TEST_CASE("fitting factor") {
    CHECK(fitting_factor(0.0) == 1.0);
    CHECK(fitting_factor(1e-6) == doctest::Approx(1.0 + 1e-12 / 3.0).epsilon(1e-15));
    CHECK(fitting_factor(2.0) == doctest::Approx(2.0 / std::tanh(2.0)).epsilon(1e-14));
    CHECK(fitting_factor(-2.0) == doctest::Approx(fitting_factor(2.0)).epsilon(1e-15));
  }

  TEST_CASE("method names round-trip") {
    for (SolveMethod m : {SolveMethod::automatic, SolveMethod::direct, SolveMethod::bicgstab})
      CHECK(solve_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(solve_method_from_string("gmres"), ConfigError);
  }
}
