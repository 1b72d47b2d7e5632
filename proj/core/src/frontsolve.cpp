#include "pulsefront/frontsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <optional>
#include <sstream>

#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"

namespace pulsefront {

const char* to_string(IterationMethod m) { return m == IterationMethod::picard ? "picard" : "newton"; }

IterationMethod iteration_method_from_string(const std::string& name) {
  if (name == "newton") return IterationMethod::newton;
  if (name == "picard") return IterationMethod::picard;
  throw ConfigError("unknown iteration method '" + name + "'");
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("solver: " + m); };
  if (!(eps > 0.0 && eps < 0.5)) fail("eps must lie in (0, 1/2)");
  if (!(delta_factor >= 0.0)) fail("delta_factor must be non-negative");
  if (homotopy_steps < 1) fail("homotopy_steps must be at least 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) fail("relaxation must lie in (0, 1]");
  if (!(tol > 0.0) || !(homotopy_tol > 0.0)) fail("tolerances must be positive");
  if (max_iter < 1) fail("max_iter must be positive");
  auto strictly = [&](const std::vector<double>& v, bool decreasing, const char* name) {
    if (v.empty()) fail(std::string(name) + " schedule is empty");
    for (double x : v)
      if (!(x > 0.0)) fail(std::string(name) + " schedule entries must be positive");
    for (std::size_t i = 1; i < v.size(); ++i)
      if (decreasing ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1]))
        fail(std::string(name) + " schedule must be strictly monotone");
  };
  strictly(eps_schedule, true, "eps");
  strictly(delta_schedule, true, "delta");
  strictly(a_schedule, false, "a");
  for (double e : eps_schedule)
    if (!(e < 0.5)) fail("eps schedule entries must lie below 1/2");
}

double slab_mean(const GridField& g, double s0, double s1) {
  const PeriodCell& c = g.cell();
  const double hs = c.h_s();
  int i0 = static_cast<int>(std::ceil((s0 + c.a()) / hs - 1e-9));
  int i1 = static_cast<int>(std::floor((s1 + c.a()) / hs + 1e-9));
  i0 = std::max(i0, 0);
  i1 = std::min(i1, c.n_s());
  if (i1 <= i0) throw ConfigError("slab_mean: slab holds fewer than two s-nodes");
  double acc = 0.0;
  for (int i = i0; i <= i1; ++i) acc += (i == i0 || i == i1 ? 0.5 : 1.0) * integrate_section(g, i);
  return acc * hs / ((i1 - i0) * hs * cell_measure(c));
}

GridField solve_T0c(double c, const CellPtr& cell, double eps, WallCondition walls,
                    const SolveOptions& linear) {
  OperatorSpec op;
  op.eps = eps;
  op.drift = c;
  BoundarySpec bc;
  bc.walls = walls;
  bc.left = 1.0;
  bc.right = 0.0;
  const LinearSystem sys = assemble(op, bc, cell);
  return sys.scatter(solve(sys, linear), BcTag::temperature, eps);
}

namespace {

double mollifier_delta(const PeriodCell& c, const SolverConfig& cfg) {
  return cfg.delta_factor * c.h_s();
}

/// Flow solves with the stream-function factorization kept across calls.
class FlowEngine {
 public:
  FlowEngine(const CellPtr& cell, const SolverConfig& cfg)
      : cell_(cell), cfg_(cfg), ext_(extended_cell(*cell, 2.0 * cell->ell())) {}

  const CellPtr& ext() const { return ext_; }

  Flow flow(const GridField& Z, double c, double tau) {
    Flow out{GridField(ext_, BcTag::vorticity, cfg_.eps), GridField(ext_, BcTag::stream, cfg_.eps),
             GridField(cell_, BcTag::velocity_component, cfg_.eps),
             GridField(cell_, BcTag::velocity_component, cfg_.eps)};
    const double amp = tau * cfg_.buoyancy;
    if (amp == 0.0) return out;

    const GridField Zx = extend_by_reflection(Z, ext_);
    const Eigen::VectorXd src = amp * tilde_perp_dot_e(Zx, ext_->gravity()).values();

    OperatorSpec op;
    op.eps = cfg_.eps;
    op.drift = c;
    BoundarySpec bc;  // omega = 0 on walls and ends
    const LinearSystem wsys = assemble(op, bc, ext_);
    GridField srcf = out.omega.like(src);
    const Eigen::VectorXd w = solve(wsys.A, wsys.b + wsys.gather(srcf), cfg_.linear);
    out.omega = wsys.scatter(w, BcTag::vorticity, cfg_.eps);

    GridField wm = out.omega;
    const double delta = mollifier_delta(*cell_, cfg_);
    if (delta > 0.0) wm = mollify(out.omega, MollifierSpec{delta, 0.0});

    if (!psi_) {
      OperatorSpec pop;
      pop.eps = cfg_.eps;
      psi_.emplace(assemble(pop, bc, ext_));
      psi_solver_.compute(psi_->A, cfg_.linear);
    }
    const Eigen::VectorXd p = psi_solver_.solve(psi_->b - psi_->gather(wm));
    out.psi = psi_->scatter(p, BcTag::stream, cfg_.eps);

    const auto grad = tilde_gradient(out.psi);
    out.u1 = restrict_to(grad[1], cell_);
    GridField v2 = restrict_to(grad[0], cell_);
    v2.values() *= -1.0;
    out.u2 = std::move(v2);
    out.u1.set_tag(BcTag::velocity_component);
    out.u2.set_tag(BcTag::velocity_component);
    return out;
  }

 private:
  CellPtr cell_;
  const SolverConfig& cfg_;
  CellPtr ext_;
  std::optional<LinearSystem> psi_;
  LinearSolver psi_solver_;
};

Eigen::VectorXd reaction_values(const GridField& T, const ReactionSpec& rs, bool derivative) {
  const PeriodCell& c = T.cell();
  Eigen::VectorXd out(static_cast<Eigen::Index>(T.size()));
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) {
        const double x = c.x_node(j), z = c.z_node(j, k), t = T(i, j, k);
        out[static_cast<Eigen::Index>(T.index(i, j, k))] =
            derivative ? evaluate_dT(rs, x, z, t) : evaluate(rs, x, z, t);
      }
  return out;
}

LinearSystem temperature_system(const CellPtr& cell, const SolverConfig& cfg, double c,
                                const Flow& fl, const Eigen::VectorXd* reaction) {
  OperatorSpec op;
  op.eps = cfg.eps;
  op.drift = c;
  op.u1 = &fl.u1;
  op.u2 = &fl.u2;
  op.reaction = reaction;
  BoundarySpec bc;
  bc.walls = cfg.walls;
  bc.left = 1.0;
  bc.right = 0.0;
  return assemble(op, bc, cell);
}

void check_range(const GridField& T) {
  const double lo = T.values().minCoeff(), hi = T.values().maxCoeff();
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw SolverError("temperature became NaN");
  if (lo < -0.1 || hi > 1.1) {
    std::ostringstream os;
    os << "temperature left [-0.1, 1.1] (min " << lo << ", max " << hi << "): diverging";
    throw SolverError(os.str());
  }
}

void finish(FrontSolution& s) {
  const double a = s.cell().a(), l = s.cell().ell();
  s.theta_minus = slab_mean(s.T, -a, -a + l);
  s.theta_plus = slab_mean(s.T, a - l, a);
}

/// Literal temperature row and speed update, with the flow already computed from Z.
std::pair<GridField, double> literal_update(const GridField& Z, double c, double tau, const Flow& fl,
                                            const ReactionSpec& rs, const SolverConfig& cfg,
                                            double rho) {
  const LinearSystem sys = temperature_system(Z.cell_ptr(), cfg, c, fl, nullptr);
  GridField fz = Z.like(tau * reaction_values(Z, rs, false));
  const Eigen::VectorXd x = solve(sys.A, sys.b + sys.gather(fz), cfg.linear);
  GridField T = sys.scatter(x, BcTag::temperature, cfg.eps);
  const double c_new = c + rho * (rs.theta0 - max_right_half(Z).first);
  return {std::move(T), c_new};
}

/// One bordered Newton step on (T, c) with the flow frozen, pinning T = theta0
/// at the current argmax over s >= 0.
std::pair<double, double> newton_step(GridField& T, double& c, double tau, const Flow& fl,
                                      const ReactionSpec& rs, const SolverConfig& cfg) {
  const CellPtr& cell = T.cell_ptr();
  const Eigen::VectorXd F = tau * reaction_values(T, rs, false);
  const Eigen::VectorXd dF = tau * reaction_values(T, rs, true);
  const Eigen::VectorXd r = -dF;
  auto residual = [&](const LinearSystem& sys) {
    const Eigen::VectorXd Tu = sys.gather(T);
    const GridField Ff = T.like(F), dFf = T.like(dF);
    return Eigen::VectorXd(sys.A * Tu + sys.gather(dFf).cwiseProduct(Tu) - sys.b - sys.gather(Ff));
  };
  const LinearSystem J = temperature_system(cell, cfg, c, fl, &r);
  const Eigen::VectorXd R = residual(J);
  const double dc_fd = 1e-6 * std::max(1.0, std::abs(c));
  const LinearSystem J2 = temperature_system(cell, cfg, c + dc_fd, fl, &r);
  const Eigen::VectorXd Rc = (residual(J2) - R) / dc_fd;

  const std::size_t p = max_right_half(T).second;
  const std::ptrdiff_t up = J.unknown_of_node[p];
  if (up < 0) throw SolverError("normalization node is not an unknown");

  LinearSolver lin;
  lin.compute(J.A, cfg.linear);
  ConvergenceRecord r1, r2;
  const Eigen::VectorXd x1 = lin.solve(-R, &r1);
  const Eigen::VectorXd x2 = lin.solve(Rc, &r2);
  if (cfg.verbosity > 1)
    std::fprintf(stderr, "[front]   linear %s %d + %s %d iterations\n", r1.method.c_str(),
                 r1.iterations, r2.method.c_str(), r2.iterations);
  const double target = rs.theta0 - T.values()[static_cast<Eigen::Index>(p)];
  if (!(std::abs(x2[up]) > 0.0)) throw SolverError("speed direction is degenerate");
  double dc = (x1[up] - target) / x2[up];
  Eigen::VectorXd dT = x1 - dc * x2;

  // Keep early homotopy steps inside the basin.
  const double big = dT.lpNorm<Eigen::Infinity>();
  if (big > 0.25) {
    dT *= 0.25 / big;
    dc *= 0.25 / big;
  }
  for (std::size_t u = 0; u < J.node_of_unknown.size(); ++u)
    T.values()[static_cast<Eigen::Index>(J.node_of_unknown[u])] += dT[static_cast<Eigen::Index>(u)];
  c += dc;
  return {dT.lpNorm<Eigen::Infinity>(), std::abs(dc)};
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string history_tail(const std::vector<ResidualEntry>& h) {
  std::ostringstream os;
  const std::size_t from = h.size() > 5 ? h.size() - 5 : 0;
  os << "last updates:";
  for (std::size_t i = from; i < h.size(); ++i)
    os << " (tau " << h[i].tau << ", dT " << h[i].dT << ", dc " << h[i].dc << ")";
  return os.str();
}

}  // namespace

Flow compute_flow(const GridField& Z, double c, double tau, const SolverConfig& cfg) {
  FlowEngine eng(Z.cell_ptr(), cfg);
  return eng.flow(Z, c, tau);
}

FrontSolution apply_S_tau(const FrontSolution& state, const ReactionSpec& spec,
                          const SolverConfig& cfg) {
  FlowEngine eng(state.T.cell_ptr(), cfg);
  Flow fl = eng.flow(state.T, state.c, state.tau);
  FrontSolution out = state;
  auto [T, c] = literal_update(state.T, state.c, state.tau, fl, spec, cfg, cfg.relaxation);
  out.history.push_back({state.tau, (T.values() - state.T.values()).lpNorm<Eigen::Infinity>(),
                         std::abs(c - state.c)});
  check_range(T);
  out.T = std::move(T);
  out.c = c;
  out.omega = std::move(fl.omega);
  out.psi = std::move(fl.psi);
  out.u1 = std::move(fl.u1);
  out.u2 = std::move(fl.u2);
  out.iterations = state.iterations + 1;
  finish(out);
  return out;
}

FrontSolution initial_state(const CellPtr& cell, const ReactionSpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  spec.validate();
  std::vector<double> xs(static_cast<std::size_t>(cell->n_x()));
  for (int j = 0; j < cell->n_x(); ++j) xs[j] = cell->x_node(j);
  const double M = spec.vanishes() ? 0.0 : lipschitz_slope(spec, xs, 20000);
  FrontSolution s;
  s.c = c_star(spec.theta0, cell->a(), cfg.eps, 10.0 * (1.0 + M));
  s.T = solve_T0c(s.c, cell, cfg.eps, cfg.walls, cfg.linear);
  FlowEngine eng(cell, cfg);
  Flow fl = eng.flow(s.T, s.c, 0.0);
  s.omega = std::move(fl.omega);
  s.psi = std::move(fl.psi);
  s.u1 = std::move(fl.u1);
  s.u2 = std::move(fl.u2);
  s.tau = 0.0;
  s.eps = cfg.eps;
  s.delta = mollifier_delta(*cell, cfg);
  s.a = cell->a();
  finish(s);
  return s;
}

FrontSolution fixed_point_solve(const SolverConfig& cfg, const ReactionSpec& spec,
                                const FrontSolution& initial) {
  cfg.validate();
  spec.validate();
  const CellPtr cell = initial.T.cell_ptr();
  FlowEngine eng(cell, cfg);
  FrontSolution s = initial;
  s.eps = cfg.eps;
  s.delta = mollifier_delta(*cell, cfg);
  s.a = cell->a();
  s.converged = false;
  GridField T = initial.T;
  T.set_eps(cfg.eps);
  double c = initial.c;
  const double tau0 = std::clamp(initial.tau, 0.0, 1.0);
  const auto t_start = std::chrono::steady_clock::now();
  const int steps = tau0 >= 1.0 ? 1 : cfg.homotopy_steps;

  for (int k = 1; k <= steps; ++k) {
    const double tau = tau0 >= 1.0 ? 1.0 : tau0 + (1.0 - tau0) * k / steps;
    const double tol = k == steps ? cfg.tol : cfg.homotopy_tol;
    bool ok = false;
    for (int it = 0; it < cfg.max_iter; ++it) {
      const Flow fl = eng.flow(T, c, tau);
      double dT, dc;
      if (cfg.method == IterationMethod::newton) {
        std::tie(dT, dc) = newton_step(T, c, tau, fl, spec, cfg);
      } else {
        auto [Tn, cn] = literal_update(T, c, tau, fl, spec, cfg, cfg.relaxation);
        dT = (Tn.values() - T.values()).lpNorm<Eigen::Infinity>();
        dc = std::abs(cn - c);
        T = std::move(Tn);
        c = cn;
      }
      s.history.push_back({tau, dT, dc});
      ++s.iterations;
      if (cfg.verbosity > 0)
        std::fprintf(stderr, "[front] tau %.3f it %d c %.12f dT %.3e dc %.3e  %.2fs\n", tau, it, c,
                     dT, dc, seconds_since(t_start));
      check_range(T);
      if (dT + dc <= tol) {
        ok = true;
        break;
      }
    }
    s.tau = tau;
    if (!ok) {
      std::ostringstream os;
      os << "fixed point iteration did not converge at tau = " << tau << " within " << cfg.max_iter
         << " iterations; " << history_tail(s.history);
      throw SolverError(os.str());
    }
  }

  Flow fl = eng.flow(T, c, s.tau);
  // Residual of the literal map S_tau with full speed update.
  auto [Tn, cn] = literal_update(T, c, s.tau, fl, spec, cfg, 1.0);
  s.fixed_point_residual = (Tn.values() - T.values()).lpNorm<Eigen::Infinity>() + std::abs(cn - c);
  s.T = std::move(T);
  s.c = c;
  s.omega = std::move(fl.omega);
  s.psi = std::move(fl.psi);
  s.u1 = std::move(fl.u1);
  s.u2 = std::move(fl.u2);
  s.converged = true;
  finish(s);
  return s;
}

FrontSolution fixed_point_solve(const SolverConfig& cfg, const ReactionSpec& spec,
                                const CellPtr& cell) {
  return fixed_point_solve(cfg, spec, initial_state(cell, spec, cfg));
}

FrontSolution extend_box(const FrontSolution& sol, const CellPtr& larger) {
  const PeriodCell& o = sol.cell();
  const PeriodCell& n = *larger;
  if (std::abs(o.h_s() - n.h_s()) > 1e-12 * o.h_s() || n.a() < o.a() || n.n_x() != o.n_x() ||
      n.n_z() != o.n_z())
    throw ConfigError("extend_box: the larger box must share the grid spacing and cross-section");
  const int off = static_cast<int>(std::lround((n.a() - o.a()) / n.h_s()));
  FrontSolution out = sol;
  out.T = GridField(larger, BcTag::temperature, sol.eps);
  for (int i = 0; i <= n.n_s(); ++i)
    for (int j = 0; j < n.n_x(); ++j)
      for (int k = 0; k <= n.n_z(); ++k) {
        const int io = i - off;
        out.T(i, j, k) = io < 0 ? 1.0 : io > o.n_s() ? 0.0 : sol.T(io, j, k);
      }
  out.u1 = GridField(larger, BcTag::velocity_component, sol.eps);
  out.u2 = GridField(larger, BcTag::velocity_component, sol.eps);
  const CellPtr ext = extended_cell(n, 2.0 * n.ell());
  out.omega = GridField(ext, BcTag::vorticity, sol.eps);
  out.psi = GridField(ext, BcTag::stream, sol.eps);
  out.a = n.a();
  finish(out);
  return out;
}

ContinuationResult continuation_run(const SolverConfig& cfg, const ReactionSpec& spec,
                                    const GeometryConfig& geometry,
                                    const std::function<void(const ContinuationStage&)>& on_stage) {
  cfg.validate();
  ContinuationResult res;
  const CellPtr base = build_period_cell(geometry);
  std::optional<FrontSolution> warm;

  auto run_stage = [&](const std::string& name, double value, const SolverConfig& sc,
                       const CellPtr& cell) -> bool {
    ContinuationStage st;
    st.parameter = name;
    st.value = value;
    try {
      FrontSolution start;
      if (warm && sc.warm_start) {
        start = warm->T.cell().a() == cell->a() ? *warm : extend_box(*warm, cell);
        start.tau = 1.0;
      } else {
        start = initial_state(cell, spec, sc);
      }
      st.solution = fixed_point_solve(sc, spec, start);
      st.ok = true;
      st.c = st.solution.c;
      st.theta_minus = st.solution.theta_minus;
      st.iterations = st.solution.iterations - (warm && sc.warm_start ? warm->iterations : 0);
      warm = st.solution;
      warm->iterations = st.solution.iterations;
    } catch (const Error& e) {
      st.error = e.what();
    }
    if (on_stage) on_stage(st);
    res.stages.push_back(std::move(st));
    return res.stages.back().ok;
  };

  SolverConfig sc = cfg;
  for (double e : cfg.eps_schedule) {
    sc.eps = e;
    if (!run_stage("eps", e, sc, base)) break;
  }
  const std::optional<FrontSolution> after_eps = warm;
  for (double d : cfg.delta_schedule) {
    sc.delta_factor = d;
    if (!run_stage("delta", d * base->h_s(), sc, base)) break;
  }
  warm = after_eps;
  sc.delta_factor = cfg.delta_factor;
  for (double af : cfg.a_schedule) {
    GeometryConfig g = geometry;
    g.a = af * geometry.ell;
    g.n_s = static_cast<int>(std::lround(geometry.n_s * g.a / geometry.a));
    if (!run_stage("a", g.a, sc, build_period_cell(g))) break;
  }

  std::vector<const ContinuationStage*> eps_ok;
  res.speed_positive = !res.stages.empty();
  for (const auto& st : res.stages) {
    if (st.parameter == "eps" && st.ok) eps_ok.push_back(&st);
    if (!st.ok || !(st.c > 0.0)) res.speed_positive = false;
  }
  if (eps_ok.size() >= 2) {
    const auto* p = eps_ok[eps_ok.size() - 2];
    const auto* q = eps_ok.back();
    res.c_extrapolated = q->c - q->value * (p->c - q->c) / (p->value - q->value);
  } else if (!eps_ok.empty()) {
    res.c_extrapolated = eps_ok.back()->c;
  }
  return res;
}

namespace {

double cubic_in_s(const GridField& g, double s, int j, int k, double left, double right) {
  const PeriodCell& c = g.cell();
  if (s <= -c.a()) return left;
  if (s >= c.a()) return right;
  const double u = (s + c.a()) / c.h_s();
  const int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, c.n_s() - 3);
  double acc = 0.0;
  for (int m = 0; m < 4; ++m) {
    double w = 1.0;
    for (int q = 0; q < 4; ++q)
      if (q != m) w *= (u - (i0 + q)) / static_cast<double>(m - q);
    acc += w * g(i0 + m, j, k);
  }
  return acc;
}

}  // namespace

StationaryFrame to_stationary_frame(const FrontSolution& sol, double t, double x_lo, int cols) {
  if (!(sol.c > 0.0)) throw ConfigError("to_stationary_frame: needs c > 0");
  const PeriodCell& c = sol.cell();
  const double hx = c.h_x();
  const long base = std::lround(x_lo / hx);
  if (std::abs(base * hx - x_lo) > 1e-9 * std::max(1.0, std::abs(x_lo)))
    throw ConfigError("to_stationary_frame: x_lo must be a grid column");
  StationaryFrame out;
  out.t = t;
  out.nz_nodes = c.nz_nodes();
  for (int q = 0; q < cols; ++q) {
    const long jj = base + q;
    const double x = static_cast<double>(jj) * hx;
    const int j = c.wrap(static_cast<int>(jj % c.n_x()));
    const double s = x - sol.c * t;
    out.x.push_back(x);
    for (int k = 0; k <= c.n_z(); ++k) {
      out.z.push_back(c.z_node(j, k));
      out.T.push_back(cubic_in_s(sol.T, s, j, k, 1.0, 0.0));
      out.u1.push_back(cubic_in_s(sol.u1, s, j, k, 0.0, 0.0));
      out.u2.push_back(cubic_in_s(sol.u2, s, j, k, 0.0, 0.0));
    }
  }
  return out;
}

}  // namespace pulsefront
