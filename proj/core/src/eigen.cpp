#include "pulsefront/eigen.hpp"

#include <cmath>
#include <sstream>

#include "pulsefront/errors.hpp"
#include "pulsefront/linsolve.hpp"

namespace pulsefront {

EigenPair principal_eigenpair(const EigenProblem& pb) {
  if (!pb.cell) throw ConfigError("eigen: missing cell");
  const PlaneGrid g = PlaneGrid::periodic_cell(*pb.cell);
  std::vector<double> kappa(2 * static_cast<std::size_t>(g.cols()));
  for (int j = 0; j < g.cols(); ++j)
    for (Wall w : {Wall::bottom, Wall::top})
      kappa[2 * j + (w == Wall::top)] = pb.robin_sign * pb.alpha * g.normal(j, w)[0];

  PlaneOperator op;
  op.u1_const = 2.0 * pb.alpha * pb.drift_sign;
  PlaneBoundary bc;
  bc.walls = PlaneWall::robin;
  bc.kappa = &kappa;
  const PlaneSystem sys = assemble_plane(g, op, bc);
  const auto n = sys.A.rows();
  Eigen::SparseMatrix<double> shifted = sys.A;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1.0;
  shifted.makeCompressed();

  LinearSolver lin;
  SolveOptions so;
  so.method = SolveMethod::direct;
  lin.compute(shifted, so);

  EigenPair out;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  for (int it = 1; it <= pb.max_iter; ++it) {
    Eigen::VectorXd y = lin.solve(x);
    const Eigen::Index imax = [&] {
      Eigen::Index m;
      y.cwiseAbs().maxCoeff(&m);
      return m;
    }();
    y /= y[imax];
    const Eigen::VectorXd Ay = sys.A * y;
    const double mu = Ay.dot(y) / y.dot(y);
    const double res = (Ay - mu * y).lpNorm<Eigen::Infinity>();
    const double change = (y - x).lpNorm<Eigen::Infinity>();
    x = std::move(y);
    out.mu = mu;
    out.residual = res;
    out.iterations = it;
    if (res <= pb.tol && change <= 1e2 * pb.tol) break;
  }
  if (!(out.residual <= std::max(pb.tol, 1e-8))) {
    std::ostringstream os;
    os << "eigen: inverse iteration stalled, residual " << out.residual;
    throw SolverError(os.str());
  }
  out.psi = sys.scatter(x);
  out.min_psi = out.psi.minCoeff();
  if (!(out.min_psi > 0.0)) throw SolverError("eigen: principal eigenvector is not positive");

  const auto grad = plane_gradient(g, out.psi);
  for (Eigen::Index i = 0; i < out.psi.size(); ++i)
    out.grad_log_sup = std::max(out.grad_log_sup, std::hypot(grad[0][i], grad[1][i]) / out.psi[i]);
  return out;
}

GridField comparison_envelope(const CellPtr& cell, double A, double alpha,
                              const Eigen::VectorXd& psi, double R) {
  const PeriodCell& c = *cell;
  const auto plane = static_cast<Eigen::Index>(c.n_x()) * c.nz_nodes();
  if (psi.size() != plane) throw ConfigError("comparison_envelope: psi does not match the cell");
  GridField out(cell, BcTag::temperature);
  for (int i = 0; i <= c.n_s(); ++i) {
    const double e = A * std::exp(-alpha * (c.s_node(i) - R));
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k)
        out(i, j, k) = e * psi[static_cast<Eigen::Index>(j) * c.nz_nodes() + k];
  }
  return out;
}

double phi_c(double s, double c, double a, double eps) {
  const double ct = c / (1.0 + eps);
  if (ct == 0.0) return (a - s) / (2.0 * a);
  // expm1 ratios; for ct > 0 factor out the growing exponentials.
  if (ct < 0.0) return std::expm1(ct * (a - s)) / std::expm1(2.0 * ct * a);
  return std::exp(-ct * (s + a)) * std::expm1(-ct * (a - s)) / std::expm1(-2.0 * ct * a);
}

double c_star(double theta0, double a, double eps, double c_max, double tol) {
  if (!(a > 0.0)) throw ConfigError("c_star: a must be positive");
  auto F = [&](double c) { return phi_c(0.0, c, a, eps) - theta0; };
  double lo = -c_max, hi = c_max;
  double flo = F(lo), fhi = F(hi);
  if (flo * fhi > 0.0) throw SolverError("c_star: no sign change in the bracket");
  // phi_c(0) decreases in c
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = F(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pulsefront
