#include "pulsefront/dns.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pulsefront/errors.hpp"
#include "pulsefront/fields.hpp"

namespace pulsefront {

void DnsConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("dns: " + m); };
  if (n_periods < 8) fail("n_periods must be at least 8");
  if (cols_per_period < 4 || n_z < 4) fail("grid counts must be at least 4");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (steps < 0) fail("steps must be non-negative");
  if (!(front_x0 > 0.0 && front_x0 < n_periods)) fail("front_x0 must lie inside the strip");
  if (!(init_width > 0.0)) fail("init_width must be positive");
  if (!(delta >= 0.0)) fail("delta must be non-negative");
  if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (history_every < 1) fail("history_every must be positive");
  if (!(snapshot_every > 0.0)) fail("snapshot_every must be positive");
}

namespace {

PlaneGrid strip_grid(const GeometryConfig& geometry, const DnsConfig& cfg) {
  GeometryConfig g = geometry;
  g.n_x = cfg.cols_per_period;
  g.n_z = cfg.n_z;
  g.n_s = 4;
  g.a = 2.0 * g.ell;
  const CellPtr cell = build_period_cell(g);
  return PlaneGrid::strip(*cell, cfg.n_periods);
}

// Separable bump on the plane, odd about the zero boundary values.
Eigen::VectorXd mollify_plane(const PlaneGrid& g, const Eigen::VectorXd& v, double delta,
                              double href) {
  const std::vector<double> wx = bump_weights(delta, g.h_x());
  const std::vector<double> wz = bump_weights(delta / href, g.h_sigma());
  const int mx = static_cast<int>(wx.size() / 2), mz = static_cast<int>(wz.size() / 2);
  const int nc = g.cols(), nk = g.nz_nodes();
  if (mz > g.n_z() || mx > nc - 1) throw ConfigError("dns: mollifier wider than the strip");
  auto odd = [](int q, int n, auto&& at) {
    if (q < 0) return -at(-q);
    if (q >= n) return -at(2 * (n - 1) - q);
    return at(q);
  };
  Eigen::VectorXd a(v.size()), b(v.size());
  for (int j = 0; j < nc; ++j)
    for (int k = 0; k < nk; ++k) {
      double acc = 0.0;
      for (int q = -mx; q <= mx; ++q)
        acc += wx[q + mx] * odd(j + q, nc, [&](int jj) { return v[g.index(jj, k)]; });
      a[g.index(j, k)] = acc;
    }
  for (int j = 0; j < nc; ++j)
    for (int k = 0; k < nk; ++k) {
      double acc = 0.0;
      for (int q = -mz; q <= mz; ++q)
        acc += wz[q + mz] * odd(k + q, nk, [&](int kk) { return a[g.index(j, kk)]; });
      b[g.index(j, k)] = acc;
    }
  return b;
}

double mean_height(const PlaneGrid& g) {
  double acc = 0.0;
  for (int j = 0; j < g.cols(); ++j) acc += g.height(j);
  return acc / g.cols();
}

}  // namespace

struct Dns::Impl {
  PlaneSystem T_impl, W_impl, T_lap, W_lap, P_sys;
  LinearSolver T_solver, W_solver, P_solver;
  double dt = -1.0;
  double href = 1.0;
};

Dns::Dns(const GeometryConfig& geometry, const ReactionSpec& spec, const DnsConfig& cfg)
    : geometry_(geometry), spec_(spec), cfg_(cfg), grid_(strip_grid(geometry, cfg)),
      impl_(std::make_unique<Impl>()) {
  cfg_.validate();
  spec_.validate();
  SolveOptions direct;
  direct.method = SolveMethod::direct;
  PlaneOperator lap;
  PlaneBoundary wall0;  // Dirichlet zero on walls and ends
  impl_->href = mean_height(grid_);
  impl_->P_sys = assemble_plane(grid_, lap, wall0);
  impl_->P_solver.compute(impl_->P_sys.A, direct);
  if (cfg_.second_order) {
    PlaneBoundary tb;
    tb.walls = PlaneWall::robin;
    tb.left = 1.0;
    impl_->T_lap = assemble_plane(grid_, lap, tb);
    impl_->W_lap = impl_->P_sys;
  }
}

Dns::~Dns() = default;
Dns::Dns(Dns&&) noexcept = default;

DnsState Dns::init() const {
  const PlaneGrid& g = grid_;
  DnsState s;
  const auto n = static_cast<Eigen::Index>(g.size());
  s.T.resize(n);
  const double x0 = cfg_.front_x0 * g.ell();
  for (int j = 0; j < g.cols(); ++j)
    for (int k = 0; k <= g.n_z(); ++k) {
      double v = 0.5 * (1.0 - std::tanh((g.x(j) - x0) / cfg_.init_width));
      if (j == 0) v = 1.0;
      if (j == g.cols() - 1) v = 0.0;
      s.T[g.index(j, k)] = v;
    }
  s.omega = Eigen::VectorXd::Zero(n);
  update_flow(s);
  s.min_T_seen = s.T.minCoeff();
  s.max_T_seen = s.T.maxCoeff();
  return s;
}

void Dns::update_flow(DnsState& s) const {
  const PlaneGrid& g = grid_;
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd w = s.omega;
  if (cfg_.delta > 0.0) w = mollify_plane(g, w, cfg_.delta, impl_->href);
  const PlaneSystem& P = impl_->P_sys;
  const Eigen::VectorXd p = impl_->P_solver.solve(P.b - P.gather(w));
  s.psi = P.scatter(p);
  const Eigen::VectorXd px = plane_d_xi(g, s.psi), ps = plane_d_sigma(g, s.psi);
  s.U.resize(n);
  s.W.resize(n);
  s.u1.resize(n);
  s.u2.resize(n);
  for (int j = 0; j < g.cols(); ++j)
    for (int k = 0; k <= g.n_z(); ++k) {
      const auto i = static_cast<Eigen::Index>(g.index(j, k));
      const double H = g.height(j);
      const bool edge = k == 0 || k == g.n_z() || g.end_column(j);
      s.U[i] = ps[i] / H;
      s.W[i] = edge ? 0.0 : -px[i] / H;
      s.u1[i] = s.U[i];
      s.u2[i] = H * s.W[i] - g.metric(j, k).sigma_x * H * s.U[i];
    }
}

double Dns::divergence_norm(const DnsState& s) const {
  const PlaneGrid& g = grid_;
  const Eigen::VectorXd a = plane_d_xi(g, s.u1), b = plane_d_sigma(g, s.u1),
                        c = plane_d_sigma(g, s.u2);
  Eigen::VectorXd d2(s.u1.size());
  for (int j = 0; j < g.cols(); ++j)
    for (int k = 0; k <= g.n_z(); ++k) {
      const auto i = static_cast<Eigen::Index>(g.index(j, k));
      const double div = a[i] + g.metric(j, k).sigma_x * b[i] + c[i] / g.height(j);
      d2[i] = div * div;
    }
  return std::sqrt(g.integrate(d2));
}

void Dns::step(DnsState& s, double dt) {
  const PlaneGrid& g = grid_;
  const double hx = g.h_x(), hz = g.h_sigma();
  double courant = 0.0;
  for (Eigen::Index i = 0; i < s.U.size(); ++i)
    courant = std::max(courant, std::abs(s.U[i]) / hx + std::abs(s.W[i]) / hz);
  const double umax = std::max(s.u1.cwiseAbs().maxCoeff(), s.u2.cwiseAbs().maxCoeff());
  double hmin = hx;
  for (int j = 0; j < g.cols(); ++j) hmin = std::min(hmin, hz * g.height(j));
  if (dt * courant > cfg_.cfl || dt > cfg_.cfl * hmin / std::max(umax, cfg_.speed_floor)) {
    std::ostringstream os;
    os << "dns: time step " << dt << " violates the advective CFL limit (Courant " << dt * courant
       << ")";
    throw ConfigError(os.str());
  }

  const bool second = cfg_.second_order;
  if (impl_->dt != dt) {
    SolveOptions direct;
    direct.method = SolveMethod::direct;
    PlaneOperator op;
    op.r = 1.0;
    op.nu = (second ? 0.5 : 1.0) * dt;
    op.monotone = !second;
    PlaneBoundary tb;
    tb.walls = PlaneWall::robin;
    tb.left = 1.0;
    impl_->T_impl = assemble_plane(g, op, tb);
    impl_->T_solver.compute(impl_->T_impl.A, direct);
    impl_->W_impl = assemble_plane(g, op, PlaneBoundary{});
    impl_->W_solver.compute(impl_->W_impl.A, direct);
    impl_->dt = dt;
  }

  // Buoyancy curl e . (-T_z, T_x).
  const auto grad = plane_gradient(g, s.T);
  const double gang = geometry_.gravity_angle;
  const double e0 = std::sin(gang), e1 = std::cos(gang);
  const Eigen::VectorXd src = cfg_.buoyancy * (-e0 * grad[1] + e1 * grad[0]);

  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd rhsT(n), rhsW(n);
  auto react = [&](int j, int k, double t) { return evaluate(spec_, g.x(j), g.z(j, k), t); };

  if (!second) {
    // Upwind advection as a convex combination, then reaction, then implicit diffusion.
    for (int j = 0; j < g.cols(); ++j)
      for (int k = 0; k <= g.n_z(); ++k) {
        const auto i = static_cast<Eigen::Index>(g.index(j, k));
        double t = s.T[i];
        if (!g.end_column(j)) {
          const double U = s.U[i], W = s.W[i];
          const double dx = U > 0.0 ? s.T[i] - s.T[g.index(j - 1, k)] : s.T[g.index(j + 1, k)] - s.T[i];
          double dz = 0.0;
          if (W != 0.0)
            dz = W > 0.0 ? s.T[i] - s.T[g.index(j, k - 1)] : s.T[g.index(j, k + 1)] - s.T[i];
          t -= dt * (U * dx / hx + W * dz / hz);
          t += dt * react(j, k, t);
        }
        rhsT[i] = t;
        rhsW[i] = s.omega[i] + dt * src[i];
      }
  } else {
    const Eigen::VectorXd Tx = plane_d_xi(g, s.T), Ts = plane_d_sigma(g, s.T);
    Eigen::VectorXd nT(n);
    for (int j = 0; j < g.cols(); ++j)
      for (int k = 0; k <= g.n_z(); ++k) {
        const auto i = static_cast<Eigen::Index>(g.index(j, k));
        nT[i] = -(s.U[i] * Tx[i] + s.W[i] * Ts[i]) + react(j, k, s.T[i]);
      }
    const Eigen::VectorXd& nW = src;
    const bool ab2 = s.nT_prev.size() == n;
    const Eigen::VectorXd eT = ab2 ? Eigen::VectorXd(1.5 * nT - 0.5 * s.nT_prev) : nT;
    const Eigen::VectorXd eW = ab2 ? Eigen::VectorXd(1.5 * nW - 0.5 * s.nW_prev) : nW;
    s.nT_prev = nT;
    s.nW_prev = nW;
    // (I + dt/2 Lap) applied explicitly through the assembled -Lap.
    const PlaneSystem& LT = impl_->T_lap;
    const PlaneSystem& LW = impl_->W_lap;
    const Eigen::VectorXd lapT = LT.scatter(-(LT.A * LT.gather(s.T) - LT.b));
    const Eigen::VectorXd lapW = LW.scatter(-(LW.A * LW.gather(s.omega) - LW.b));
    rhsT = s.T + 0.5 * dt * lapT + dt * eT;
    rhsW = s.omega + 0.5 * dt * lapW + dt * eW;
  }

  const PlaneSystem& MT = impl_->T_impl;
  s.T = MT.scatter(impl_->T_solver.solve(MT.b + MT.gather(rhsT)));
  const PlaneSystem& MW = impl_->W_impl;
  s.omega = MW.scatter(impl_->W_solver.solve(MW.b + MW.gather(rhsW)));
  if (!s.T.allFinite() || !s.omega.allFinite()) throw SolverError("dns: NaN in the solution");

  s.t += dt;
  ++s.step;
  update_flow(s);
  s.min_T_seen = std::min(s.min_T_seen, s.T.minCoeff());
  s.max_T_seen = std::max(s.max_T_seen, s.T.maxCoeff());
  const double um = std::max(s.u1.cwiseAbs().maxCoeff(), s.u2.cwiseAbs().maxCoeff());
  s.max_u_seen = std::max(s.max_u_seen, um);

  if (s.step % cfg_.history_every == 0) {
    const auto xf = front_position(g, s.T, spec_.theta0);
    s.history.push_back({s.t, xf ? *xf : std::nan(""), s.T.maxCoeff(), um, s.T.minCoeff()});
    if (!xf) s.stopped = true;
  }
  const double se = cfg_.snapshot_every;
  if (s.t >= cfg_.transient - 1e-12 &&
      (s.snapshots.empty() || s.t - s.snapshots.back().t >= se - 1e-9 * se))
    s.snapshots.push_back({s.t, s.T});
}

void Dns::run(DnsState& s) {
  const double x_end = grid_.x(grid_.cols() - 1);
  for (int it = 0; it < cfg_.steps && !s.stopped; ++it) {
    step(s, cfg_.dt);
    if (!s.history.empty() && s.history.back().x_f > x_end - cfg_.stop_margin * grid_.ell())
      s.stopped = true;
  }
}

std::optional<double> front_position(const std::vector<double>& x, const std::vector<double>& m,
                                     double level) {
  if (x.size() != m.size() || x.empty()) throw ConfigError("front_position: size mismatch");
  std::ptrdiff_t last = -1;
  for (std::size_t j = 0; j < m.size(); ++j)
    if (m[j] >= level) last = static_cast<std::ptrdiff_t>(j);
  if (last < 0) return std::nullopt;
  const auto j = static_cast<std::size_t>(last);
  if (j + 1 == m.size()) return x[j];
  return x[j] + (m[j] - level) / (m[j] - m[j + 1]) * (x[j + 1] - x[j]);
}

std::optional<double> front_position(const PlaneGrid& g, const Eigen::VectorXd& T, double theta0) {
  std::vector<double> x(static_cast<std::size_t>(g.cols()));
  for (int j = 0; j < g.cols(); ++j) x[j] = g.x(j);
  return front_position(x, g.column_means(T), 0.5 * (1.0 + theta0));
}

SpeedFit measure_speed(const std::vector<DnsHistoryRow>& h, double t_from) {
  double st = 0, sx = 0, stt = 0, stx = 0, sxx = 0;
  int n = 0;
  for (const auto& r : h) {
    if (r.t < t_from || !std::isfinite(r.x_f)) continue;
    st += r.t;
    sx += r.x_f;
    stt += r.t * r.t;
    stx += r.t * r.x_f;
    sxx += r.x_f * r.x_f;
    ++n;
  }
  if (n < 20) {
    std::ostringstream os;
    os << "measure_speed: " << n << " samples after the transient cut, need at least 20";
    throw ConfigError(os.str());
  }
  SpeedFit f;
  f.samples = n;
  const double vt = stt - st * st / n, vx = sxx - sx * sx / n, cv = stx - st * sx / n;
  f.c = vt > 0.0 ? cv / vt : 0.0;
  if (vt > 0.0 && vx > 1e-300) {
    f.r2 = cv * cv / (vt * vx);
    f.warning = f.r2 < 0.95;
  } else {
    f.r2 = std::nan("");
    f.warning = true;
  }
  return f;
}

double pulsating_check(const PlaneGrid& g, const std::vector<DnsSnapshot>& snaps, double t1,
                       double c, double x_lo, double x_hi) {
  if (!(c > 0.0)) throw ConfigError("pulsating_check: needs c > 0");
  auto at = [&](double t) -> Eigen::VectorXd {
    for (std::size_t i = 0; i + 1 < snaps.size(); ++i)
      if (snaps[i].t <= t + 1e-12 && t <= snaps[i + 1].t + 1e-12) {
        const double w = (t - snaps[i].t) / (snaps[i + 1].t - snaps[i].t);
        return (1.0 - w) * snaps[i].T + w * snaps[i + 1].T;
      }
    std::ostringstream os;
    os << "pulsating_check: snapshots do not cover t = " << t;
    throw ConfigError(os.str());
  };
  const Eigen::VectorXd A = at(t1), B = at(t1 + g.ell() / c);
  const int shift = static_cast<int>(std::lround(g.ell() / g.h_x()));
  double num = 0.0, den = 0.0;
  for (int j = shift; j < g.cols(); ++j) {
    if (g.x(j) < x_lo || g.x(j) > x_hi) continue;
    for (int k = 0; k <= g.n_z(); ++k) {
      const double wz = (k == 0 || k == g.n_z()) ? 0.5 : 1.0;
      const double d = B[g.index(j, k)] - A[g.index(j - shift, k)];
      num += wz * g.height(j) * d * d;
      den += wz * g.height(j) * A[g.index(j, k)] * A[g.index(j, k)];
    }
  }
  if (!(den > 0.0)) throw ConfigError("pulsating_check: empty window");
  return std::sqrt(num / den);
}

DnsSummary summarize_dns(const Dns& dns, const DnsState& s, double theta0, double half_window) {
  DnsSummary out;
  out.speed = measure_speed(s.history, dns.config().transient);
  const PlaneGrid& g = dns.grid();
  if (s.snapshots.empty() || !(out.speed.c > 0.0)) return out;
  out.t1 = s.snapshots.front().t;
  if (s.snapshots.back().t < out.t1 + g.ell() / out.speed.c) return out;
  const auto xf = front_position(g, s.snapshots.front().T, theta0);
  if (!xf) return out;
  const double centre = *xf + g.ell();
  out.x_lo = std::max(centre - half_window * g.ell(), g.ell());
  out.x_hi = std::min(centre + half_window * g.ell(), g.x(g.cols() - 1));
  out.pulsating = pulsating_check(g, s.snapshots, out.t1, out.speed.c, out.x_lo, out.x_hi);
  return out;
}

}  // namespace pulsefront
