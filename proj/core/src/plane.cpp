#include "pulsefront/plane.hpp"

#include <cmath>

#include "pulsefront/errors.hpp"

namespace pulsefront {

void PlaneGrid::build(const GeometryConfig& cfg) {
  bottom_.resize(cols_);
  top_.resize(cols_);
  bottom_slope_.resize(cols_);
  top_slope_.resize(cols_);
  bottom_curv_.resize(cols_);
  top_curv_.resize(cols_);
  for (int j = 0; j < cols_; ++j) {
    const double xx = x(j);
    bottom_[j] = cfg.bottom.value(xx);
    top_[j] = cfg.top.value(xx);
    bottom_slope_[j] = cfg.bottom.slope(xx);
    top_slope_[j] = cfg.top.slope(xx);
    bottom_curv_[j] = cfg.bottom.curvature(xx);
    top_curv_[j] = cfg.top.curvature(xx);
  }
  metric_.resize(size());
  for (int j = 0; j < cols_; ++j) {
    const double h = height(j);
    const double hp = top_slope_[j] - bottom_slope_[j];
    const double hpp = top_curv_[j] - bottom_curv_[j];
    for (int k = 0; k <= n_z_; ++k) {
      const double sg = sigma(k);
      const double num = bottom_slope_[j] + sg * hp;
      const double num_p = bottom_curv_[j] + sg * hpp;
      metric_[index(j, k)] = {h, -num / h, -(num_p * h - num * hp) / (h * h), -hp / h};
    }
  }
}

PlaneGrid PlaneGrid::periodic_cell(const PeriodCell& cell) {
  PlaneGrid g;
  g.periodic_ = true;
  g.cols_ = cell.n_x();
  g.n_z_ = cell.n_z();
  g.h_x_ = cell.h_x();
  g.ell_ = cell.ell();
  g.build(cell.config());
  return g;
}

PlaneGrid PlaneGrid::strip(const PeriodCell& cell, int periods) {
  if (periods < 1) throw ConfigError("strip: need at least one period");
  PlaneGrid g;
  g.periodic_ = false;
  g.cols_ = periods * cell.n_x() + 1;
  g.n_z_ = cell.n_z();
  g.h_x_ = cell.h_x();
  g.ell_ = cell.ell();
  g.build(cell.config());
  return g;
}

std::array<double, 2> PlaneGrid::normal(int j, Wall w) const {
  const double d = slope(j, w);
  const double n = std::sqrt(1.0 + d * d);
  if (w == Wall::bottom) return {d / n, -1.0 / n};
  return {-d / n, 1.0 / n};
}

double PlaneGrid::wall_gain(int j, Wall w) const {
  const double d = slope(j, w);
  return height(j) * d / (1.0 + d * d);
}

double PlaneGrid::wall_flux_gain(int j, Wall w) const {
  const double d = slope(j, w);
  const double q = height(j) / std::sqrt(1.0 + d * d);
  return w == Wall::bottom ? -q : q;
}

double PlaneGrid::wall_gain_slope(int j, Wall w) const {
  const int jj = wrap(j);
  const double d = slope(jj, w);
  const double dd = w == Wall::bottom ? bottom_curv_[jj] : top_curv_[jj];
  const double hp = top_slope_[jj] - bottom_slope_[jj];
  const double q = 1.0 + d * d;
  return hp * d / q + height(jj) * dd * (1.0 - d * d) / (q * q);
}

double PlaneGrid::integrate(const Eigen::VectorXd& g) const {
  double acc = 0.0;
  for (int j = 0; j < cols_; ++j) {
    const double wx = (!periodic_ && (j == 0 || j == cols_ - 1)) ? 0.5 * h_x_ : h_x_;
    double col = 0.0;
    for (int k = 0; k <= n_z_; ++k) {
      const double wz = (k == 0 || k == n_z_) ? 0.5 * h_sigma() : h_sigma();
      col += wz * g[static_cast<Eigen::Index>(index(j, k))];
    }
    acc += wx * height(j) * col;
  }
  return acc;
}

std::vector<double> PlaneGrid::column_means(const Eigen::VectorXd& g) const {
  std::vector<double> m(cols_);
  for (int j = 0; j < cols_; ++j) {
    double col = 0.0;
    for (int k = 0; k <= n_z_; ++k) {
      const double wz = (k == 0 || k == n_z_) ? 0.5 * h_sigma() : h_sigma();
      col += wz * g[static_cast<Eigen::Index>(index(j, k))];
    }
    m[j] = col;
  }
  return m;
}

Eigen::VectorXd PlaneSystem::scatter(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = dirichlet_values;
  for (std::size_t u = 0; u < node_of_unknown.size(); ++u)
    g[static_cast<Eigen::Index>(node_of_unknown[u])] = x[static_cast<Eigen::Index>(u)];
  return g;
}

Eigen::VectorXd PlaneSystem::gather(const Eigen::VectorXd& g) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(node_of_unknown.size()));
  for (std::size_t u = 0; u < node_of_unknown.size(); ++u)
    x[static_cast<Eigen::Index>(u)] = g[static_cast<Eigen::Index>(node_of_unknown[u])];
  return x;
}

namespace {

struct PlaneAssembler {
  const PlaneGrid& g;
  const PlaneOperator& op;
  const PlaneBoundary& bc;
  PlaneSystem& sys;
  std::vector<Eigen::Triplet<double>> trip;
  int row = 0;
  double rhs = 0.0;

  void add(int j, int k, double w) {
    if (w == 0.0) return;
    const std::size_t n = g.index(j, k);
    const std::ptrdiff_t col = sys.unknown_of_node[n];
    if (col < 0)
      rhs -= w * sys.dirichlet_values[static_cast<Eigen::Index>(n)];
    else
      trip.emplace_back(row, static_cast<int>(col), w);
  }

  double wall_data(const std::vector<double>* v, int j, Wall w) const {
    if (!v) return 0.0;
    return (*v)[2 * static_cast<std::size_t>(g.wrap(j)) + (w == Wall::top ? 1 : 0)];
  }

  // b * d/dx, centered or upwinded.
  void first_x(int j, int k, double b, bool upwind) {
    const double h = g.h_x();
    if (!upwind) {
      add(j + 1, k, b / (2.0 * h));
      add(j - 1, k, -b / (2.0 * h));
    } else if (b > 0.0) {
      add(j, k, b / h);
      add(j - 1, k, -b / h);
    } else {
      add(j + 1, k, b / h);
      add(j, k, -b / h);
    }
  }

  void first_z(int j, int k, double b, bool upwind) {
    const double h = g.h_sigma();
    if (!upwind) {
      add(j, k + 1, b / (2.0 * h));
      add(j, k - 1, -b / (2.0 * h));
    } else if (b > 0.0) {
      add(j, k, b / h);
      add(j, k - 1, -b / h);
    } else {
      add(j, k + 1, b / h);
      add(j, k, -b / h);
    }
  }

  void node(int j, int k) {
    const double hx = g.h_x(), hz = g.h_sigma();
    const std::size_t n = g.index(j, k);
    const auto ni = static_cast<Eigen::Index>(n);
    const SigmaMetric& m = g.metric(j, k);
    const double H = g.height(j);
    const double sx = m.sigma_x;
    const double nu = op.nu;
    const double v1 = op.u1_const + (op.u1 ? (*op.u1)[ni] : 0.0);
    const double v2 = op.u2 ? (*op.u2)[ni] : 0.0;
    const double c_xz = 2.0 * sx;
    const double c_zz = sx * sx + 1.0 / (H * H);
    const double m_z = m.sigma_x_xi + sx * m.sigma_x_sigma;
    const double b_zp = v1 * sx + v2 / H;
    double diag = op.r + (op.r_field ? (*op.r_field)[ni] : 0.0);

    if (k == 0 || k == g.n_z()) {
      const Wall w = k == 0 ? Wall::bottom : Wall::top;
      const double sgn = k == 0 ? -1.0 : 1.0;
      const int kin = k == 0 ? 1 : g.n_z() - 1;
      const double G = g.wall_gain(j, w), Gp = g.wall_gain_slope(j, w);
      const double Q = g.wall_flux_gain(j, w);
      const double kap = wall_data(bc.kappa, j, w);
      const double qq = wall_data(bc.q, j, w);
      auto qk = [&](int jj) { return g.wall_flux_gain(jj, w) * wall_data(bc.kappa, jj, w); };
      auto qd = [&](int jj) { return g.wall_flux_gain(jj, w) * wall_data(bc.q, jj, w); };
      const double qk_x = (qk(j + 1) - qk(j - 1)) / (2.0 * hx);
      const double qd_x = (qd(j + 1) - qd(j - 1)) / (2.0 * hx);
      const double K = -nu * c_zz * sgn * 2.0 / hz - nu * m_z + b_zp;
      const double axx = nu * (1.0 + c_xz * G);
      add(j + 1, k, -axx / (hx * hx));
      add(j - 1, k, -axx / (hx * hx));
      diag += 2.0 * axx / (hx * hx);
      first_x(j, k, v1 + K * G - nu * c_xz * (Gp + Q * kap), op.monotone);
      diag += 2.0 * nu * c_zz / (hz * hz) + K * Q * kap - nu * c_xz * qk_x;
      add(j, kin, -2.0 * nu * c_zz / (hz * hz));
      rhs += -K * Q * qq + nu * c_xz * qd_x;
      add(j, k, diag);
      return;
    }

    add(j + 1, k, -nu / (hx * hx));
    add(j - 1, k, -nu / (hx * hx));
    add(j, k + 1, -nu * c_zz / (hz * hz));
    add(j, k - 1, -nu * c_zz / (hz * hz));
    diag += 2.0 * nu / (hx * hx) + 2.0 * nu * c_zz / (hz * hz);
    first_x(j, k, v1, op.monotone);
    first_z(j, k, b_zp - nu * m_z, op.monotone);

    // -nu c_xz g_{x sigma}
    const double gam = nu * c_xz;
    if (!op.monotone) {
      const double w4 = -gam / (4.0 * hx * hz);
      add(j + 1, k + 1, w4);
      add(j - 1, k - 1, w4);
      add(j + 1, k - 1, -w4);
      add(j - 1, k + 1, -w4);
    } else {
      const double w2 = gam / (2.0 * hx * hz);
      if (gam > 0.0) {
        add(j + 1, k + 1, -w2);
        add(j - 1, k - 1, -w2);
      } else {
        add(j + 1, k - 1, w2);
        add(j - 1, k + 1, w2);
      }
      const double a = std::abs(w2);
      add(j + 1, k, a);
      add(j - 1, k, a);
      add(j, k + 1, a);
      add(j, k - 1, a);
      diag -= 2.0 * a;
    }
    add(j, k, diag);
  }
};

}  // namespace

PlaneSystem assemble_plane(const PlaneGrid& g, const PlaneOperator& op, const PlaneBoundary& bc) {
  PlaneSystem sys;
  sys.dirichlet_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  sys.unknown_of_node.assign(g.size(), -1);
  if (bc.walls == PlaneWall::robin)
    for (int j = 0; j < g.cols(); ++j)
      for (Wall w : {Wall::bottom, Wall::top})
        if (std::abs(g.slope(j, w)) >= 1.0)
          throw ConfigError("plane: conormal closure needs wall slopes below 1 in magnitude");
  for (int j = 0; j < g.cols(); ++j)
    for (int k = 0; k <= g.n_z(); ++k) {
      const std::size_t n = g.index(j, k);
      const bool wall = k == 0 || k == g.n_z();
      if (g.end_column(j)) {
        sys.dirichlet_values[static_cast<Eigen::Index>(n)] = j == 0 ? bc.left : bc.right;
      } else if (wall && bc.walls == PlaneWall::dirichlet) {
        const Wall w = k == 0 ? Wall::bottom : Wall::top;
        sys.dirichlet_values[static_cast<Eigen::Index>(n)] =
            bc.wall_values ? (*bc.wall_values)[2 * static_cast<std::size_t>(j) + (w == Wall::top)]
                           : 0.0;
      } else {
        sys.unknown_of_node[n] = static_cast<std::ptrdiff_t>(sys.node_of_unknown.size());
        sys.node_of_unknown.push_back(n);
      }
    }
  const auto nu = static_cast<Eigen::Index>(sys.node_of_unknown.size());
  sys.b = Eigen::VectorXd::Zero(nu);
  PlaneAssembler as{g, op, bc, sys, {}, 0, 0.0};
  as.trip.reserve(static_cast<std::size_t>(nu) * 11);
  for (std::size_t u = 0; u < sys.node_of_unknown.size(); ++u) {
    const std::size_t n = sys.node_of_unknown[u];
    as.row = static_cast<int>(u);
    as.rhs = 0.0;
    as.node(static_cast<int>(n / g.nz_nodes()), static_cast<int>(n % g.nz_nodes()));
    sys.b[static_cast<Eigen::Index>(u)] = as.rhs;
  }
  sys.A.resize(nu, nu);
  sys.A.setFromTriplets(as.trip.begin(), as.trip.end());
  sys.A.makeCompressed();
  return sys;
}

Eigen::VectorXd plane_d_xi(const PlaneGrid& g, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  const double h = g.h_x();
  const int nc = g.cols();
  for (int j = 0; j < nc; ++j)
    for (int k = 0; k <= g.n_z(); ++k) {
      auto at = [&](int jj) { return v[static_cast<Eigen::Index>(g.index(jj, k))]; };
      double d;
      if (g.periodic() || (j > 0 && j < nc - 1))
        d = (at(j + 1) - at(j - 1)) / (2.0 * h);
      else if (j == 0)
        d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      else
        d = (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * h);
      out[static_cast<Eigen::Index>(g.index(j, k))] = d;
    }
  return out;
}

Eigen::VectorXd plane_d_sigma(const PlaneGrid& g, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  const double h = g.h_sigma();
  const int nz = g.n_z();
  for (int j = 0; j < g.cols(); ++j)
    for (int k = 0; k <= nz; ++k) {
      auto at = [&](int kk) { return v[static_cast<Eigen::Index>(g.index(j, kk))]; };
      double d;
      if (k == 0)
        d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      else if (k == nz)
        d = (3.0 * at(nz) - 4.0 * at(nz - 1) + at(nz - 2)) / (2.0 * h);
      else
        d = (at(k + 1) - at(k - 1)) / (2.0 * h);
      out[static_cast<Eigen::Index>(g.index(j, k))] = d;
    }
  return out;
}

std::array<Eigen::VectorXd, 2> plane_gradient(const PlaneGrid& g, const Eigen::VectorXd& v) {
  const Eigen::VectorXd dx = plane_d_xi(g, v), dz = plane_d_sigma(g, v);
  Eigen::VectorXd gx(v.size()), gz(v.size());
  for (int j = 0; j < g.cols(); ++j)
    for (int k = 0; k <= g.n_z(); ++k) {
      const auto n = static_cast<Eigen::Index>(g.index(j, k));
      gx[n] = dx[n] + g.metric(j, k).sigma_x * dz[n];
      gz[n] = dz[n] / g.height(j);
    }
  return {gx, gz};
}

}  // namespace pulsefront
