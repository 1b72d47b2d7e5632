#include "pulsefront/linsolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

double fitting_factor(double p) {
  p = std::abs(p);
  if (p < 1e-4) return 1.0 + p * p / 3.0;
  if (p > 20.0) return p;
  return p / std::tanh(p);
}

GridField LinearSystem::scatter(const Eigen::VectorXd& x, BcTag tag, double eps) const {
  GridField g = dirichlet_values;
  g.set_tag(tag);
  g.set_eps(eps);
  for (std::size_t u = 0; u < node_of_unknown.size(); ++u)
    g.values()[static_cast<Eigen::Index>(node_of_unknown[u])] = x[static_cast<Eigen::Index>(u)];
  return g;
}

Eigen::VectorXd LinearSystem::gather(const GridField& g) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(node_of_unknown.size()));
  for (std::size_t u = 0; u < node_of_unknown.size(); ++u)
    x[static_cast<Eigen::Index>(u)] = g.values()[static_cast<Eigen::Index>(node_of_unknown[u])];
  return x;
}

namespace {

struct Assembler {
  const PeriodCell& c;
  const OperatorSpec& op;
  const BoundarySpec& bc;
  LinearSystem& sys;
  std::vector<Eigen::Triplet<double>> trip;
  std::ptrdiff_t row = 0;
  double rhs = 0.0;

  bool dirichlet(int i, int k) const {
    if (i == 0 || i == c.n_s()) return true;
    return bc.walls == WallCondition::dirichlet && (k == 0 || k == c.n_z());
  }

  void add(int i, int j, int k, double w) {
    if (w == 0.0) return;
    const std::size_t n = sys.dirichlet_values.index(i, j, k);
    const std::ptrdiff_t col = sys.unknown_of_node[n];
    if (col < 0)
      rhs -= w * sys.dirichlet_values.values()[static_cast<Eigen::Index>(n)];
    else
      trip.emplace_back(static_cast<int>(row), static_cast<int>(col), w);
  }

  double flux(int i, int j, Wall w) const {
    if (!bc.wall_flux) return 0.0;
    return (*bc.wall_flux)[wall_flux_index(c, i, j, w)];
  }

  // b * d/dxi with optional upwind blending.
  void first_x(int i, int j, int k, double b, double blend) {
    const double h = c.h_x();
    const double cen = (1.0 - blend) * b / (2.0 * h);
    add(i, j + 1, k, cen);
    add(i, j - 1, k, -cen);
    if (blend > 0.0) {
      const double up = blend * b / h;
      if (b > 0.0) {
        add(i, j, k, up);
        add(i, j - 1, k, -up);
      } else {
        add(i, j + 1, k, up);
        add(i, j, k, -up);
      }
    }
  }

  void node(int i, int j, int k) {
    const double hs = c.h_s(), hx = c.h_x(), hz = c.h_sigma();
    const std::size_t n = sys.dirichlet_values.index(i, j, k);
    const SigmaMetric& m = c.metric(j, k);
    const double H = c.height(j);
    const double sx = m.sigma_x;
    const double v1 = op.u1 ? op.u1->values()[static_cast<Eigen::Index>(n)] : 0.0;
    const double v2 = op.u2 ? op.u2->values()[static_cast<Eigen::Index>(n)] : 0.0;

    double a_ss = 1.0 + op.eps, a_sx = 2.0, a_xx = 1.0;
    const double a_sz = 2.0 * sx;
    const double a_zz = sx * sx + 1.0 / (H * H);
    double b_s = -op.drift + v1;
    double b_x = v1;
    const double b_z = v1 * sx + v2 / H - (m.sigma_x_xi + sx * m.sigma_x_sigma);

    bool upwinded = false;
    const bool wall = k == 0 || k == c.n_z();
    if (wall) {
      // Ghost elimination with g_sigma = G (g_s + g_xi) + Q q.
      const Wall w = k == 0 ? Wall::bottom : Wall::top;
      const double sgn = k == 0 ? -1.0 : 1.0;
      const int kin = k == 0 ? 1 : c.n_z() - 1;
      const double G = c.wall_gain(j, w);
      const double Gp = c.wall_gain_slope(j, w);
      const double Q = c.wall_flux_gain(j, w);
      const double kappa = -a_zz * sgn * 2.0 / hz + b_z;
      a_ss += a_sz * G;
      a_sx += 2.0 * a_sz * G;
      a_xx += a_sz * G;
      b_s += kappa * G - a_sz * Gp;
      b_x += kappa * G - a_sz * Gp;
      add(i, j, kin, -2.0 * a_zz / (hz * hz));
      add(i, j, k, 2.0 * a_zz / (hz * hz));
      if (bc.wall_flux) {
        const double qs = Q * (flux(i + 1, j, w) - flux(i - 1, j, w)) / (2.0 * hs);
        const double qx = (c.wall_flux_gain(j + 1, w) * flux(i, j + 1, w) -
                           c.wall_flux_gain(j - 1, w) * flux(i, j - 1, w)) /
                          (2.0 * hx);
        rhs += -kappa * Q * flux(i, j, w) + a_sz * (qs + qx);
      }
    } else {
      // interior sigma terms
      double blend_z = op.upwind_blend;
      if (op.auto_upwind && std::abs(b_z) * hz > op.peclet_threshold * a_zz) blend_z = 1.0;
      add(i, j, k + 1, -a_zz / (hz * hz));
      add(i, j, k - 1, -a_zz / (hz * hz));
      add(i, j, k, 2.0 * a_zz / (hz * hz));
      const double cen = (1.0 - blend_z) * b_z / (2.0 * hz);
      add(i, j, k + 1, cen);
      add(i, j, k - 1, -cen);
      if (blend_z > 0.0) {
        const double up = blend_z * b_z / hz;
        if (b_z > 0.0) {
          add(i, j, k, up);
          add(i, j, k - 1, -up);
        } else {
          add(i, j, k + 1, up);
          add(i, j, k, -up);
        }
      }
      upwinded = upwinded || blend_z > 0.0;
      const double wsz = -a_sz / (4.0 * hs * hz);
      add(i + 1, j, k + 1, wsz);
      add(i + 1, j, k - 1, -wsz);
      add(i - 1, j, k + 1, -wsz);
      add(i - 1, j, k - 1, wsz);
      const double wxz = -a_sz / (4.0 * hx * hz);
      add(i, j + 1, k + 1, wxz);
      add(i, j + 1, k - 1, -wxz);
      add(i, j - 1, k + 1, -wxz);
      add(i, j - 1, k - 1, wxz);
    }

    // s direction
    if (op.exponential_fitting) a_ss *= fitting_factor((v1 - op.drift) * hs / (2.0 * a_ss));
    add(i + 1, j, k, -a_ss / (hs * hs) + b_s / (2.0 * hs));
    add(i - 1, j, k, -a_ss / (hs * hs) - b_s / (2.0 * hs));
    add(i, j, k, 2.0 * a_ss / (hs * hs));

    // xi direction. Only the physical advection v1 is ever upwinded; the
    // first-derivative terms left by the ghost elimination stay centered.
    double blend_x = op.upwind_blend;
    if (op.auto_upwind && std::abs(v1) * hx > op.peclet_threshold) blend_x = 1.0;
    add(i, j + 1, k, -a_xx / (hx * hx));
    add(i, j - 1, k, -a_xx / (hx * hx));
    add(i, j, k, 2.0 * a_xx / (hx * hx));
    first_x(i, j, k, v1, blend_x);
    first_x(i, j, k, b_x - v1, 0.0);
    if (upwinded || blend_x > 0.0) ++sys.upwinded_nodes;

    // s-xi cross
    const double wsx = -a_sx / (4.0 * hs * hx);
    add(i + 1, j + 1, k, wsx);
    add(i + 1, j - 1, k, -wsx);
    add(i - 1, j + 1, k, -wsx);
    add(i - 1, j - 1, k, wsx);

    if (op.reaction) add(i, j, k, (*op.reaction)[static_cast<Eigen::Index>(n)]);
  }
};

}  // namespace

LinearSystem assemble(const OperatorSpec& op, const BoundarySpec& bc, const CellPtr& cell) {
  const PeriodCell& c = *cell;
  if (!(op.eps >= 0.0)) throw ConfigError("assemble: eps must be non-negative");
  for (int j = 0; j < c.n_x() && bc.walls == WallCondition::conormal; ++j)
    for (Wall w : {Wall::bottom, Wall::top}) {
      const double d = c.wall_slope(j, w);
      if (!std::isfinite(d) || std::abs(d) >= 1.0) {
        std::ostringstream os;
        os << "assemble: conormal closure degenerates at x = " << c.x_node(j)
           << " (wall slope " << d << ", need |slope| < 1)";
        throw ConfigError(os.str());
      }
    }

  LinearSystem sys;
  sys.cell = cell;
  sys.dirichlet_values = GridField(cell, BcTag::temperature);
  const std::size_t nn = sys.dirichlet_values.size();
  sys.unknown_of_node.assign(nn, -1);

  Assembler as{c, op, bc, sys, {}, 0, 0.0};
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) {
        const std::size_t n = sys.dirichlet_values.index(i, j, k);
        if (as.dirichlet(i, k)) {
          double v;
          if (bc.dirichlet)
            v = (*bc.dirichlet)(i, j, k);
          else if (i == 0)
            v = bc.left;
          else if (i == c.n_s())
            v = bc.right;
          else
            v = 0.0;
          sys.dirichlet_values.values()[static_cast<Eigen::Index>(n)] = v;
        } else {
          sys.unknown_of_node[n] = static_cast<std::ptrdiff_t>(sys.node_of_unknown.size());
          sys.node_of_unknown.push_back(n);
        }
      }

  const auto nu = static_cast<Eigen::Index>(sys.node_of_unknown.size());
  sys.b = Eigen::VectorXd::Zero(nu);
  as.trip.reserve(static_cast<std::size_t>(nu) * 19);
  for (std::size_t u = 0; u < sys.node_of_unknown.size(); ++u) {
    const std::size_t n = sys.node_of_unknown[u];
    const int k = static_cast<int>(n % c.nz_nodes());
    const int j = static_cast<int>((n / c.nz_nodes()) % c.n_x());
    const int i = static_cast<int>(n / (static_cast<std::size_t>(c.nz_nodes()) * c.n_x()));
    as.row = static_cast<std::ptrdiff_t>(u);
    as.rhs = 0.0;
    as.node(i, j, k);
    sys.b[static_cast<Eigen::Index>(u)] = as.rhs;
  }
  sys.A.resize(nu, nu);
  sys.A.setFromTriplets(as.trip.begin(), as.trip.end());
  sys.A.makeCompressed();
  return sys;
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::automatic: return "automatic";
    case SolveMethod::direct: return "direct";
    case SolveMethod::bicgstab: return "bicgstab";
  }
  return "automatic";
}

SolveMethod solve_method_from_string(const std::string& name) {
  if (name == "automatic") return SolveMethod::automatic;
  if (name == "direct") return SolveMethod::direct;
  if (name == "bicgstab") return SolveMethod::bicgstab;
  throw ConfigError("unknown linear solver '" + name + "'");
}

struct LinearSolver::Impl {
  SolveOptions opts;
  Eigen::SparseMatrix<double> A;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu;
  std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>> krylov;

  void factor_direct() {
    lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
    lu->analyzePattern(A);
    lu->factorize(A);
    if (lu->info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed: " + lu->lastErrorMessage());
  }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::compute(const Eigen::SparseMatrix<double>& A, const SolveOptions& opts) {
  impl_->opts = opts;
  impl_->A = A;
  impl_->lu.reset();
  impl_->krylov.reset();
  const auto n = static_cast<std::size_t>(A.rows());
  const bool direct = opts.method == SolveMethod::direct ||
                      (opts.method == SolveMethod::automatic && n < opts.small_limit);
  if (direct) {
    impl_->factor_direct();
    return;
  }
  impl_->krylov = std::make_unique<
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>();
  impl_->krylov->preconditioner().setDroptol(opts.ilut_drop);
  impl_->krylov->preconditioner().setFillfactor(opts.ilut_fill);
  impl_->krylov->setTolerance(opts.tol);
  impl_->krylov->setMaxIterations(opts.max_iter);
  impl_->krylov->compute(impl_->A);
  if (impl_->krylov->info() != Eigen::Success) {
    impl_->krylov.reset();
    impl_->factor_direct();
  }
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b, ConvergenceRecord* record) {
  ConvergenceRecord rec;
  const double bn = b.norm();
  Eigen::VectorXd x;
  if (bn == 0.0) {
    x = Eigen::VectorXd::Zero(b.size());
    rec = {true, 0, 0.0, impl_->lu ? "direct" : "bicgstab"};
    if (record) *record = rec;
    return x;
  }
  if (impl_->krylov) {
    x = impl_->krylov->solve(b);
    rec.method = "bicgstab";
    rec.iterations = static_cast<int>(impl_->krylov->iterations());
    rec.residual = (impl_->A * x - b).norm() / bn;
    // The recursive residual can drift from the true one; restart from x.
    for (int restart = 0; restart < 3 && std::isfinite(rec.residual) &&
                          rec.residual > 10.0 * impl_->opts.tol;
         ++restart) {
      x = impl_->krylov->solveWithGuess(b, x);
      rec.iterations += static_cast<int>(impl_->krylov->iterations());
      rec.residual = (impl_->A * x - b).norm() / bn;
    }
    rec.converged = std::isfinite(rec.residual) && rec.residual <= 10.0 * impl_->opts.tol;
    if (!rec.converged && static_cast<std::size_t>(b.size()) < impl_->opts.direct_limit) {
      impl_->krylov.reset();
      impl_->factor_direct();
    }
  }
  if (impl_->lu) {
    x = impl_->lu->solve(b);
    rec.method = rec.method.empty() ? "direct" : "bicgstab+direct";
    rec.iterations = 1;
    rec.residual = (impl_->A * x - b).norm() / bn;
    rec.converged = std::isfinite(rec.residual);
  }
  if (record) *record = rec;
  if (!std::isfinite(rec.residual)) throw SolverError("linear solve produced NaN");
  if (!rec.converged) {
    std::ostringstream os;
    os << "linear solve did not converge: relative residual " << rec.residual << " after "
       << rec.iterations << " iterations";
    throw SolverError(os.str());
  }
  return x;
}

Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                      const SolveOptions& opts, ConvergenceRecord* record) {
  LinearSolver s;
  s.compute(A, opts);
  return s.solve(b, record);
}

Eigen::VectorXd solve(const LinearSystem& sys, const SolveOptions& opts, ConvergenceRecord* record) {
  return solve(sys.A, sys.b, opts, record);
}

}  // namespace pulsefront
