#include "pulsefront/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"

namespace pulsefront {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::warn: return "warn";
    case Verdict::fail: return "fail";
    case Verdict::info: return "info";
  }
  return "info";
}

bool DiagnosticsReport::any_failed() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const DiagnosticEntry& e) { return e.verdict == Verdict::fail; });
}

const DiagnosticEntry* DiagnosticsReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

GridField reaction_field(const GridField& T, const ReactionSpec& spec) {
  const PeriodCell& c = T.cell();
  GridField out(T.cell_ptr(), BcTag::temperature, T.eps());
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k)
        out(i, j, k) = evaluate(spec, c.x_node(j), c.z_node(j, k), T(i, j, k));
  return out;
}

namespace {

/// |lhs - rhs| scaled by the larger of the leading term and rhs.
double rel(double lhs, double lead, double rhs) {
  const double scale = std::max(std::abs(lead), std::abs(rhs));
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

double sup_speed(const GridField& u1, const GridField& u2, int i0 = 0, int i1 = -1) {
  const PeriodCell& c = u1.cell();
  if (i1 < 0) i1 = c.n_s();
  double m = 0.0;
  for (int i = i0; i <= i1; ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) m = std::max(m, std::hypot(u1(i, j, k), u2(i, j, k)));
  return m;
}

/// int_B eta_1 g dS over both walls at s-node i.
double wall_eta1_integral(const GridField& g, int i) {
  const PeriodCell& c = g.cell();
  double acc = 0.0;
  for (int j = 0; j < c.n_x(); ++j)
    for (Wall w : {Wall::bottom, Wall::top}) {
      const double slope = c.wall_slope(j, w);
      const int k = w == Wall::bottom ? 0 : c.n_z();
      acc += c.h_x() * std::sqrt(1.0 + slope * slope) * c.normal(j, w)[0] * g(i, j, k);
    }
  return acc;
}

}  // namespace

double reaction_rate_residual(const FrontSolution& sol, const ReactionSpec& spec) {
  const PeriodCell& c = sol.cell();
  const double omega_p = cell_measure(c);
  const double tau = sol.tau;
  const GridField Ts = d_s(sol.T);
  const double flux = (1.0 + sol.eps) * (integrate_section(Ts, c.n_s()) - integrate_section(Ts, 0));
  const double jump = sol.T(0, 0, 0) - sol.T(c.n_s(), 0, 0);
  const double lead = sol.c * omega_p * jump;
  const double rhs = tau * integrate(reaction_field(sol.T, spec));
  return rel(lead - flux, lead, rhs);
}

double energy_identity_residual(const FrontSolution& sol, const ReactionSpec& spec) {
  const PeriodCell& c = sol.cell();
  const double omega_p = cell_measure(c);
  const GridField Ts = d_s(sol.T);
  const auto gr = tilde_gradient(sol.T);
  const double tl = sol.T(0, 0, 0), tr = sol.T(c.n_s(), 0, 0);
  const double end_flux = (1.0 + sol.eps) * (tl * integrate_section(Ts, 0) -
                                             tr * integrate_section(Ts, c.n_s()));
  const double lead = 0.5 * sol.c * omega_p * (tl * tl - tr * tr);
  const double lhs = lead + end_flux + sol.eps * inner(Ts, Ts) + inner(gr[0], gr[0]) +
                     inner(gr[1], gr[1]);
  const double rhs = sol.tau * inner(sol.T, reaction_field(sol.T, spec));
  return rel(lhs, lead, rhs);
}

double burning_product(const FrontSolution& sol, const ReactionSpec& spec) {
  const GridField Ts = d_s(sol.T);
  return integrate(reaction_field(sol.T, spec)) * inner(Ts, Ts);
}

SpeedBound speed_bound_report(const FrontSolution& sol, double M, double alpha) {
  SpeedBound b;
  EigenProblem p;
  p.cell = sol.T.cell_ptr();
  p.alpha = alpha;
  const EigenPair e = principal_eigenpair(p);
  b.M = M;
  b.mu = e.mu;
  b.min_psi = e.min_psi;
  b.grad_log_psi = e.grad_log_sup;
  b.u_sup = sup_speed(sol.u1, sol.u2);
  b.ratio = sol.c / (1.0 + sol.eps + M + b.u_sup * (1.0 + b.grad_log_psi));
  return b;
}

double vorticity_bound_ratio(const FrontSolution& sol) {
  const auto gr = tilde_gradient(sol.T);
  const double den = std::sqrt(inner(gr[0], gr[0]) + inner(gr[1], gr[1]));
  if (!(den > 0.0) || sol.omega.empty()) return 0.0;
  return norm(sol.omega, NormKind::H1_tilde) / den;
}

DecayFit decay_fit(const GridField& T, const GridField* u1, const GridField* u2,
                   std::optional<double> R) {
  const PeriodCell& c = T.cell();
  DecayFit fit;
  fit.R = R.value_or(c.ell());
  fit.R_end = c.a() - c.ell();
  std::vector<double> sup(static_cast<std::size_t>(c.n_s() + 1));
  for (int i = 0; i <= c.n_s(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) m = std::max(m, T(i, j, k));
    sup[static_cast<std::size_t>(i)] = m;
  }
  const double tol = 1e-12 * c.h_s();
  std::vector<double> xs, ys;
  int i_lo = c.n_s(), i_hi = 0;
  for (int i = 0; i < c.n_s(); ++i) {
    if (c.s_node(i) < fit.R - tol || c.s_node(i + 1) > fit.R_end + tol) continue;
    const double drop = sup[static_cast<std::size_t>(i)] - sup[static_cast<std::size_t>(i + 1)];
    i_lo = std::min(i_lo, i);
    i_hi = std::max(i_hi, i + 1);
    if (!(drop > 0.0)) continue;
    xs.push_back(0.5 * (c.s_node(i) + c.s_node(i + 1)));
    ys.push_back(std::log(drop));
  }
  fit.samples = static_cast<int>(xs.size());
  if (u1 && u2 && i_lo <= i_hi) fit.u_window = sup_speed(*u1, *u2, i_lo, i_hi);
  if (fit.samples < 3) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    mx += xs[q];
    my += ys[q];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    sxx += (xs[q] - mx) * (xs[q] - mx);
    sxy += (xs[q] - mx) * (ys[q] - my);
    syy += (ys[q] - my) * (ys[q] - my);
  }
  fit.slope = sxy / sxx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

CrossSection cross_section_profile(const FrontSolution& sol, const ReactionSpec& spec) {
  const PeriodCell& c = sol.cell();
  const int n = c.n_s();
  const double h = c.h_s();
  const double omega_p = cell_measure(c);
  const GridField Ts = d_s(sol.T);
  const auto gr = tilde_gradient(sol.T);
  const GridField f = reaction_field(sol.T, spec);
  GridField body = f.like(sol.tau * f.values() + sol.c * Ts.values());
  if (!sol.u1.empty())
    body.values() -= sol.u1.values().cwiseProduct(gr[0].values()) +
                     sol.u2.values().cwiseProduct(gr[1].values());

  CrossSection cs;
  const std::size_t m = static_cast<std::size_t>(n + 1);
  cs.s.resize(m);
  cs.I.resize(m);
  cs.I_ss.resize(m);
  cs.G.resize(m);
  for (int i = 0; i <= n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    cs.s[u] = c.s_node(i);
    cs.I[u] = integrate_section(sol.T, i) / omega_p;
    cs.G[u] = (integrate_section(body, i) + wall_eta1_integral(Ts, i)) /
              ((1.0 + sol.eps) * omega_p);
  }
  const auto& I = cs.I;
  for (int i = 1; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    cs.I_ss[u] = (I[u - 1] - 2.0 * I[u] + I[u + 1]) / (h * h);
  }
  const auto N = static_cast<std::size_t>(n);
  cs.I_ss[0] = (2.0 * I[0] - 5.0 * I[1] + 4.0 * I[2] - I[3]) / (h * h);
  cs.I_ss[N] = (2.0 * I[N] - 5.0 * I[N - 1] + 4.0 * I[N - 2] - I[N - 3]) / (h * h);
  cs.slope_left = (-3.0 * I[0] + 4.0 * I[1] - I[2]) / (2.0 * h);
  cs.slope_right = (3.0 * I[N] - 4.0 * I[N - 1] + I[N - 2]) / (2.0 * h);

  double num = 0.0, den = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    const double w = (u == 0 || u == N) ? 0.5 * h : h;
    num += w * (cs.I_ss[u] + cs.G[u]) * (cs.I_ss[u] + cs.G[u]);
    den += w * cs.G[u] * cs.G[u];
  }
  cs.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  cs.monotone = true;
  for (std::size_t u = 1; u < m; ++u)
    if (I[u] > I[u - 1]) cs.monotone = false;
  return cs;
}

std::vector<double> c2_over_eps(const std::vector<double>& eps, const std::vector<double>& c) {
  if (eps.size() != c.size()) throw ConfigError("c2_over_eps: eps and c differ in length");
  std::vector<double> out;
  out.reserve(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigError("c2_over_eps: eps must be positive");
    out.push_back(c[i] * c[i] / eps[i]);
  }
  return out;
}

bool c2_over_eps_ok(const std::vector<double>& series) {
  if (series.empty()) return false;
  for (double v : series)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  // Series ordered by decreasing eps; c bounded below makes it grow.
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i] < series[i - 1]) return false;
  return true;
}

double divergence_norm(const FrontSolution& sol) {
  if (sol.u1.empty()) return 0.0;
  return norm(divergence_tilde(sol.u1, sol.u2), NormKind::L2);
}

namespace {

void add(DiagnosticsReport& r, std::string name, double value, double threshold, Verdict v,
         std::string note = {}) {
  if (!std::isfinite(value)) {
    v = Verdict::fail;
    note += note.empty() ? "non-finite value" : "; non-finite value";
  }
  r.entries.push_back({std::move(name), value, threshold, v, std::move(note)});
}

Verdict at_most(double value, double threshold) {
  return value <= threshold ? Verdict::pass : Verdict::fail;
}

}  // namespace

DiagnosticsReport diagnose(const FrontSolution& sol, const ReactionSpec& spec,
                           const DiagnosticsConfig& cfg, const ContinuationResult* continuation) {
  DiagnosticsReport r;
  const PeriodCell& cell = sol.cell();
  r.c = sol.c;
  r.eps = sol.eps;
  r.delta = sol.delta;
  r.a = sol.a;

  add(r, "speed_positive", sol.c, 0.0, sol.c > 0.0 ? Verdict::pass : Verdict::fail);

  r.normalization_error = std::abs(max_right_half(sol.T).first - spec.theta0);
  add(r, "normalization", r.normalization_error, cfg.normalization_tol,
      at_most(r.normalization_error, cfg.normalization_tol));

  r.theta_minus = sol.theta_minus;
  r.theta_plus = sol.theta_plus;
  r.reaction_rate_residual = reaction_rate_residual(sol, spec);
  add(r, "reaction_rate_residual", r.reaction_rate_residual, cfg.reaction_tol,
      r.theta_minus > 0.0 ? at_most(r.reaction_rate_residual, cfg.reaction_tol) : Verdict::fail,
      r.theta_minus > 0.0 ? "" : "theta_minus <= 0");

  r.energy_residual = energy_identity_residual(sol, spec);
  add(r, "energy_residual", r.energy_residual, cfg.energy_tol,
      at_most(r.energy_residual, cfg.energy_tol));

  r.cross_section = cross_section_profile(sol, spec);
  add(r, "cross_section_residual", r.cross_section.residual, cfg.cross_section_tol,
      at_most(r.cross_section.residual, cfg.cross_section_tol));
  const double end_slope = std::max(r.cross_section.slope_left, r.cross_section.slope_right);
  add(r, "cross_section_end_slopes", end_slope, 0.0, at_most(end_slope, 1e-10),
      "max of I_s(-a), I_s(a)");
  add(r, "cross_section_monotone", r.cross_section.monotone ? 1.0 : 0.0, 1.0, Verdict::info,
      "trend only");

  r.burning_product = burning_product(sol, spec);
  {
    Verdict v = r.burning_product > 0.0 ? Verdict::pass : Verdict::fail;
    std::string note;
    if (spec.vanishes()) {
      v = Verdict::info;
      note = "f vanishes, no front";
    }
    if (continuation) {
      std::vector<const ContinuationStage*> ok;
      for (const auto& st : continuation->stages)
        if (st.ok && st.parameter == "eps") ok.push_back(&st);
      if (ok.size() >= 2) {
        const double p = burning_product(ok[ok.size() - 2]->solution, spec);
        const double q = burning_product(ok.back()->solution, spec);
        const double drift = std::abs(q - p) / std::max(std::abs(p), std::abs(q));
        std::ostringstream os;
        os << "last two eps stages differ by " << drift;
        note = os.str();
        if (drift > cfg.stability && v == Verdict::pass) v = Verdict::warn;
      }
    }
    add(r, "burning_product", r.burning_product, 0.0, v, note);
  }

  std::vector<double> xs;
  for (int j = 0; j < cell.n_x(); ++j) xs.push_back(cell.x_node(j));
  r.speed_bound = speed_bound_report(sol, lipschitz_slope(spec, xs), cfg.eigen_alpha);
  add(r, "speed_bound_ratio", r.speed_bound.ratio, 1.0,
      r.speed_bound.ratio < 1.0 && r.speed_bound.min_psi > 0.0 ? Verdict::pass : Verdict::fail);

  r.vorticity_bound_ratio = vorticity_bound_ratio(sol);
  add(r, "vorticity_bound_ratio", r.vorticity_bound_ratio, 0.0, Verdict::info,
      "constant not quantified; compare across refinements");

  {
    Verdict v = r.theta_minus > 0.0 && r.theta_minus <= 1.0 ? Verdict::pass : Verdict::fail;
    if (cfg.smallness_family && std::abs(1.0 - r.theta_minus) > cfg.theta_one_tol) v = Verdict::fail;
    add(r, "theta_minus", r.theta_minus, cfg.smallness_family ? 1.0 - cfg.theta_one_tol : 0.0, v);
  }
  // With f = 0 the profile is the pure exponential phi_c, which has no right
  // plateau to measure.
  add(r, "theta_plus", r.theta_plus, cfg.tail_tol,
      spec.vanishes() ? Verdict::info : at_most(r.theta_plus, cfg.tail_tol),
      spec.vanishes() ? "f vanishes, no front" : "");

  r.decay = decay_fit(sol.T, sol.u1.empty() ? nullptr : &sol.u1,
                      sol.u2.empty() ? nullptr : &sol.u2);
  if (r.decay.samples < 3) {
    add(r, "decay_slope", 0.0, -sol.c / 16.0, Verdict::warn, "tail window empty");
  } else {
    add(r, "decay_slope", r.decay.slope, -sol.c / 16.0, at_most(r.decay.slope, -sol.c / 16.0));
    add(r, "decay_r2", r.decay.r2, cfg.decay_r2,
        r.decay.r2 >= cfg.decay_r2 ? Verdict::pass : Verdict::fail);
  }

  r.divergence_norm = divergence_norm(sol);
  {
    const double h = std::max({cell.h_s(), cell.h_x(), cell.h_sigma()});
    const double u_l2 = sol.u1.empty()
                            ? 0.0
                            : std::sqrt(inner(sol.u1, sol.u1) + inner(sol.u2, sol.u2));
    const double thr = cfg.divergence_factor * h * h * u_l2;
    add(r, "divergence_norm", r.divergence_norm, thr,
        r.divergence_norm <= thr || r.divergence_norm < 1e-12 ? Verdict::pass : Verdict::warn);
  }

  if (continuation) {
    std::vector<double> e, cs;
    for (const auto& st : continuation->stages)
      if (st.parameter == "eps" && st.ok) {
        e.push_back(st.value);
        cs.push_back(st.c);
      }
    if (!e.empty()) {
      r.c2_over_eps = c2_over_eps(e, cs);
      add(r, "c2_over_eps_min", *std::min_element(r.c2_over_eps.begin(), r.c2_over_eps.end()),
          0.0, c2_over_eps_ok(r.c2_over_eps) ? Verdict::pass : Verdict::fail);
    }
    add(r, "continuation_speed_positive", continuation->speed_positive ? 1.0 : 0.0, 1.0,
        continuation->speed_positive ? Verdict::pass : Verdict::fail);
  }
  return r;
}

void attach_pulsating(DiagnosticsReport& report, double mismatch, double threshold) {
  report.pulsating_mismatch = mismatch;
  add(report, "pulsating_mismatch", mismatch, threshold, at_most(mismatch, threshold));
}

}  // namespace pulsefront
