// Acceptance run: one PASS/FAIL line per criterion, exit 1 when any fails.
//   acceptance [source_dir] [scratch_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pulsefront/config.hpp"
#include "pulsefront/diagnostics.hpp"
#include "pulsefront/dns.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/frontsolve.hpp"
#include "pulsefront/io.hpp"
#include "pulsefront/mms.hpp"

namespace fs = std::filesystem;
using namespace pulsefront;

namespace {

struct Line {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Line> g_lines;
fs::path g_src, g_tmp;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
std::string g6(double v) { return fmt("%.6g", v); }

void report(const std::string& name, bool pass, const std::string& detail) {
  g_lines.push_back({name, pass, detail});
  std::cout << (pass ? "PASS " : "FAIL ") << name << " | " << detail << std::endl;
}

void progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig config(const std::string& name) { return load_config((g_src / "configs" / name).string()); }

double normalization_error(const FrontSolution& s, double theta0) {
  return std::abs(max_right_half(s.T).first - theta0);
}

// Every converged solve feeds the normalization and speed-bound criteria.
struct Converged {
  std::string label;
  double norm_err;
  double bound_ratio;
  double min_psi;
};
std::vector<Converged> g_converged;

void record(const std::string& label, const FrontSolution& s, const ReactionSpec& spec) {
  const DiagnosticsReport r = diagnose(s, spec);
  g_converged.push_back(
      {label, normalization_error(s, spec.theta0), r.speed_bound.ratio, r.speed_bound.min_psi});
}

// ---------------------------------------------------------------------------
// Independent 1D ignition front: (1 + eps) T'' + c T' + f(T) = 0 on [-a, a],
// T(-a) = 1, T(a) = 0, T(0) = theta0. Ahead of s = 0 the solution is the
// explicit exponential; shoot backwards with RK4 and bisect on c.

double cubic(double T, double theta0, double kappa) {
  return T > theta0 ? kappa * std::pow(T - theta0, 3) * (1.0 - T) : 0.0;
}

double shoot(double c, double a, double eps, double theta0, double kappa, int steps) {
  const double ct = c / (1.0 + eps);
  double T = theta0;
  double P = -theta0 * ct / (1.0 - std::exp(-ct * a));
  const double h = -a / steps;
  auto rhs = [&](double t, double p, double& dt, double& dp) {
    dt = p;
    dp = -(c * p + cubic(t, theta0, kappa)) / (1.0 + eps);
  };
  for (int n = 0; n < steps; ++n) {
    double k1t, k1p, k2t, k2p, k3t, k3p, k4t, k4p;
    rhs(T, P, k1t, k1p);
    rhs(T + 0.5 * h * k1t, P + 0.5 * h * k1p, k2t, k2p);
    rhs(T + 0.5 * h * k2t, P + 0.5 * h * k2p, k3t, k3p);
    rhs(T + h * k3t, P + h * k3p, k4t, k4p);
    T += h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
    P += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
  }
  return T;
}

double oracle_speed(double a, double eps, double theta0, double kappa) {
  double lo = 1e-3, hi = 5.0;
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (lo + hi);
    if (shoot(m, a, eps, theta0, kappa, 200000) > 1.0)
      hi = m;
    else
      lo = m;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

void mms_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double lo = 1e9, hi = -1e9;
  for (MmsRow row : {MmsRow::L_epsilon, MmsRow::omega, MmsRow::psi, MmsRow::temperature})
    for (bool wavy : {false, true}) {
      const MmsResult r = run_mms(row, wavy);
      if (r.orders.size() != 2) ok = false;
      for (double q : r.orders) {
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        ok = ok && q >= 1.8 && q <= 2.2;
      }
    }
  report("mms_convergence", ok,
         "8 rows x 2 refinements, orders in [" + g6(lo) + ", " + g6(hi) + "] (window [1.8, 2.2]), " +
             fmt("%.1f s", seconds_since(t0)));
}

void degenerate_criterion() {
  const RunConfig rc = config("planar.ini");
  const CellPtr cell = build_period_cell(rc.geometry());
  const FrontSolution s = fixed_point_solve(rc.solver, rc.reaction, cell);
  record("planar", s, rc.reaction);
  // T_0^c(0) = theta0 in closed form: e^{-c a / (1 + eps)} = theta0 / (1 - theta0).
  const double eps = rc.solver.eps, a = rc.a, th = rc.reaction.theta0;
  const double cs = (1.0 + eps) * std::log((1.0 - th) / th) / a;
  const double ct = cs / (1.0 + eps);
  double terr = 0.0;
  const PeriodCell& c = *cell;
  for (int i = 0; i <= c.n_s(); ++i) {
    const double s_i = c.s_node(i);
    const double exact = (std::exp(-ct * (s_i + a)) - std::exp(-2.0 * ct * a)) / (1.0 - std::exp(-2.0 * ct * a));
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) terr = std::max(terr, std::abs(s.T(i, j, k) - exact));
  }
  const double u = std::max(s.u1.values().cwiseAbs().maxCoeff(), s.u2.values().cwiseAbs().maxCoeff());
  const double h2 = c.h_s() * c.h_s();
  const bool ok = std::abs(s.c - cs) <= 1e-8 && terr <= h2 && u <= 1e-10;
  report("degenerate_f_zero", ok,
         "c = " + fmt("%.10f", s.c) + ", c_* = " + fmt("%.10f", cs) + ", |T - T_0^{c_*}| = " + g6(terr) +
             " (h^2 = " + g6(h2) + "), |u| = " + g6(u));
}

void oracle_criterion() {
  const double a = 8.0;
  ReactionSpec spec;
  spec.amplitude = 0.0;
  SolverConfig cfg;
  cfg.buoyancy = 0.0;
  const double c_ref = oracle_speed(a, cfg.eps, spec.theta0, spec.kappa);
  std::vector<double> gap;
  std::string detail = "oracle c = " + fmt("%.10f", c_ref);
  for (int n_s : {512, 1024}) {
    GeometryConfig g;
    g.n_s = n_s;
    g.n_x = 4;
    g.n_z = 4;
    g.a = a;
    const FrontSolution s = fixed_point_solve(cfg, spec, build_period_cell(g));
    record("oracle n_s=" + std::to_string(n_s), s, spec);
    gap.push_back(std::abs(s.c - c_ref));
    detail += ", h = 1/" + std::to_string(n_s / 16) + ": c = " + fmt("%.10f", s.c) + " gap " + g6(gap.back());
  }
  const double rel = gap[1] / c_ref;
  const bool ok = rel <= 0.02 && gap[0] >= 2.0 * gap[1];
  report("oracle_1d", ok, detail + ", relative gap at h = 1/64: " + g6(rel) + ", ratio " + g6(gap[0] / gap[1]));
}

void dns_criteria(double c_front) {
  {
    const RunConfig rc = config("default.ini");
    const auto t0 = std::chrono::steady_clock::now();
    Dns dns(rc.geometry(), rc.reaction, rc.dns);
    DnsState s = dns.init();
    dns.run(s);
    const DnsSummary sum = summarize_dns(dns, s, rc.reaction.theta0);
    const double rel = std::abs(sum.speed.c - c_front) / c_front;
    const bool ok = rel <= 0.05 && sum.pulsating && *sum.pulsating <= 0.05;
    report("dns_cross_validation", ok,
           "c_dns = " + fmt("%.6f", sum.speed.c) + " (r^2 " + fmt("%.6f", sum.speed.r2) + ") vs c = " +
               fmt("%.6f", c_front) + ", relative " + g6(rel) + ", pulsating mismatch " +
               (sum.pulsating ? g6(*sum.pulsating) : std::string("n/a")) + ", " +
               std::to_string(s.step) + " steps, " + fmt("%.1f s", seconds_since(t0)));
  }
  {
    const RunConfig rc = config("dns_first_order.ini");
    const auto t0 = std::chrono::steady_clock::now();
    Dns dns(rc.geometry(), rc.reaction, rc.dns);
    DnsState s = dns.init();
    dns.run(s);
    const bool range = s.min_T_seen >= -1e-8 && s.max_T_seen <= 1.0 + 1e-8;

    RunConfig rest = config("default.ini");
    rest.reaction.amplitude = 0.0;
    rest.dns.buoyancy = 0.0;
    rest.dns.steps = 2000;
    Dns dns0(rest.geometry(), rest.reaction, rest.dns);
    DnsState s0 = dns0.init();
    dns0.run(s0);
    const bool ok = range && s.step >= 10000 && s0.max_u_seen <= 1e-10;
    report("maximum_principle", ok,
           std::to_string(s.step) + " first-order steps, T in [" + g6(s.min_T_seen) + ", " +
               fmt("%.17g", s.max_T_seen) + "]; sigma_b = A = 0 run: " + std::to_string(s0.step) +
               " steps, max |u| = " + g6(s0.max_u_seen) + ", " + fmt("%.1f s", seconds_since(t0)));
  }
}

FrontSolution smallness_solve(double C, double a, int n_s, const FrontSolution* warm) {
  RunConfig rc = config("default.ini");
  rc.reaction.profile = ReactionProfile::smallness;
  rc.reaction.power = 3.0;
  rc.reaction.c_omega = C;
  rc.n_s = n_s;
  rc.n_x = 4;
  rc.n_z = 4;
  rc.a = a;
  const CellPtr cell = build_period_cell(rc.geometry());
  if (warm) return fixed_point_solve(rc.solver, rc.reaction, extend_box(*warm, cell));
  return fixed_point_solve(rc.solver, rc.reaction, cell);
}

void theta_criterion(const FrontSolution& def) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool def_ok = def.theta_minus > 0.0 && def.theta_minus <= 1.0;
  // Box of 64 periods; C = 1 does not converge from a cold start there and is
  // continued from the 32-period box.
  ReactionSpec sp;
  sp.profile = ReactionProfile::smallness;
  sp.power = 3.0;
  const FrontSolution w = smallness_solve(1.0, 32.0, 256, nullptr);
  std::vector<double> C{1.0, 0.1, 0.01}, th;
  std::string detail = "default theta_- = " + fmt("%.8f", def.theta_minus) + "; smallness p = 3, a = 64:";
  bool near_one = true;
  for (double c : C) {
    const FrontSolution s = smallness_solve(c, 64.0, 512, c == 1.0 ? &w : nullptr);
    sp.c_omega = c;
    record("smallness C=" + g6(c), s, sp);
    th.push_back(s.theta_minus);
    near_one = near_one && std::abs(1.0 - s.theta_minus) <= 1e-2;
    detail += " C = " + g6(c) + " -> " + fmt("%.6f", s.theta_minus);
  }
  // theta_- should not decrease as 1/C grows.
  const bool monotone = th[1] >= th[0] && th[2] >= th[1];
  report("theta_minus", def_ok && near_one && monotone,
         detail + "; within 1e-2 of 1: " + (near_one ? "yes" : "no") + ", non-decreasing in 1/C: " +
             (monotone ? "yes" : "no") + ", " + fmt("%.1f s", seconds_since(t0)));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Byte comparison of every regular file under two directories.
bool same_tree(const fs::path& a, const fs::path& b, int& files) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  files += static_cast<int>(fa.size());
  for (const auto& f : fa)
    if (slurp(a / f) != slurp(b / f)) return false;
  return true;
}

void run_modes(const RunConfig& rc, const fs::path& out) {
  const ArtifactMeta meta{rc.hash(), rc.seed, "acceptance"};
  const CellPtr cell = build_period_cell(rc.geometry());
  const FrontSolution s = fixed_point_solve(rc.solver, rc.reaction, cell);
  write_checkpoint((out / "solve" / "checkpoint").string(), s, meta);
  write_report((out / "solve").string(), diagnose(s, rc.reaction, rc.diagnostics), meta);
  write_report((out / "report").string(),
               diagnose(read_checkpoint((out / "solve" / "checkpoint").string(), rc.geometry(), rc.hash()),
                        rc.reaction, rc.diagnostics),
               meta);

  const ContinuationResult cr = continuation_run(rc.solver, rc.reaction, rc.geometry());
  write_continuation_table((out / "continuation" / "continuation.csv").string(), cr);

  RunConfig d = rc;
  d.dns.steps = 500;
  Dns dns(d.geometry(), d.reaction, d.dns);
  DnsState st = dns.init();
  dns.run(st);
  write_dns_history((out / "dns" / "dns_history.csv").string(), st.history);
  write_dns_snapshots((out / "dns" / "dns_snapshots.csv").string(), dns.grid(), st.snapshots, 0.5);

  MmsOptions o;
  o.refinements = 1;
  std::ostringstream mms;
  mms.precision(17);
  for (MmsRow row : {MmsRow::omega, MmsRow::temperature}) {
    const MmsResult r = run_mms(row, true, o);
    for (const auto& lv : r.levels) mms << to_string(row) << "," << lv.n_s << "," << lv.error << "\n";
  }
  write_text((out / "verify" / "mms.csv").string(), mms.str());
}

void determinism_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig rc = config("coarse.ini");
  const fs::path a = g_tmp / "det_a", b = g_tmp / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_modes(rc, a);
  run_modes(rc, b);
  int files = 0;
  const bool ok = same_tree(a, b, files);
  report("determinism", ok,
         std::to_string(files) + " artifacts from solve, report, continuation, dns and verify compared "
         "byte for byte (coarse config), " + fmt("%.1f s", seconds_since(t0)));
}

}  // namespace

int main(int argc, char** argv) {
  g_src = argc > 1 ? fs::path(argv[1]) : fs::path(PULSEFRONT_SOURCE_DIR);
  g_tmp = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "pulsefront_acceptance";
  fs::create_directories(g_tmp);
  const auto t_all = std::chrono::steady_clock::now();
  try {
    progress("manufactured solutions");
    mms_criterion();
    progress("degenerate regime");
    degenerate_criterion();
    progress("1D oracle");
    oracle_criterion();

    progress("default continuation");
    const RunConfig def = config("default.ini");
    const ContinuationResult cont = continuation_run(def.solver, def.reaction, def.geometry(),
                                                     [](const ContinuationStage& st) {
                                                       progress("  " + st.parameter + " = " + g6(st.value) +
                                                                (st.ok ? ", c = " + fmt("%.8f", st.c)
                                                                       : ", failed: " + st.error));
                                                     });
    const FrontSolution* front = nullptr;
    bool all_ok = true, positive = true;
    std::string series;
    std::vector<double> eps, cs;
    for (const auto& st : cont.stages) {
      all_ok = all_ok && st.ok;
      positive = positive && st.ok && st.c > 0.0;
      if (!st.ok) continue;
      record("continuation " + st.parameter + "=" + g6(st.value), st.solution, def.reaction);
      if (st.parameter == "eps") {
        eps.push_back(st.value);
        cs.push_back(st.c);
        if (std::abs(st.value - def.solver.eps) < 1e-15) front = &st.solution;
      }
    }
    const std::vector<double> q = c2_over_eps(eps, cs);
    for (double v : q) series += (series.empty() ? "" : ", ") + g6(v);
    report("speed_positive", all_ok && positive && c2_over_eps_ok(q),
           std::to_string(cont.stages.size()) + " stages, min c = " +
               g6(std::min_element(cont.stages.begin(), cont.stages.end(),
                                   [](const auto& x, const auto& y) { return x.c < y.c; })
                      ->c) +
               ", c^2/eps along eps = [" + series + "]");
    if (!front) throw SolverError("default eps stage missing from the continuation");

    progress("identity suite");
    {
      const RunConfig co = config("coarse.ini");
      const FrontSolution coarse = fixed_point_solve(co.solver, co.reaction, build_period_cell(co.geometry()));
      record("coarse", coarse, co.reaction);
      const DiagnosticsReport rc = diagnose(coarse, co.reaction);
      const DiagnosticsReport rd = diagnose(*front, def.reaction, def.diagnostics, &cont);
      const bool ok = rd.reaction_rate_residual <= 1e-2 && rd.energy_residual <= 2e-2 &&
                      rd.cross_section.residual <= 2e-2 &&
                      rd.reaction_rate_residual < rc.reaction_rate_residual &&
                      rd.energy_residual < rc.energy_residual &&
                      rd.cross_section.residual < rc.cross_section.residual;
      report("identity_suite", ok,
             "reaction " + g6(rc.reaction_rate_residual) + " -> " + g6(rd.reaction_rate_residual) +
                 ", energy " + g6(rc.energy_residual) + " -> " + g6(rd.energy_residual) +
                 ", I_ss + G " + g6(rc.cross_section.residual) + " -> " + g6(rd.cross_section.residual) +
                 " (64x8x8 -> 128x16x16)");

      const bool tail = rd.decay.samples >= 3 && rd.decay.slope <= -front->c / 16.0 && rd.decay.r2 >= 0.99 &&
                        rd.theta_plus <= 1e-3;
      report("tail", tail,
             "slope " + fmt("%.6f", rd.decay.slope) + " (bound " + fmt("%.6f", -front->c / 16.0) + "), r^2 " +
                 fmt("%.8f", rd.decay.r2) + ", theta_+ = " + g6(rd.theta_plus));

      progress("DNS");
      dns_criteria(front->c);

      progress("theta_- and smallness family");
      theta_criterion(*front);
    }

    {
      double worst = 0.0, worst_ratio = 0.0, min_psi = 1e300;
      std::string worst_label;
      for (const auto& c : g_converged) {
        if (c.norm_err > worst) worst = c.norm_err;
        if (c.bound_ratio > worst_ratio) {
          worst_ratio = c.bound_ratio;
          worst_label = c.label;
        }
        min_psi = std::min(min_psi, c.min_psi);
      }
      report("normalization", worst <= 1e-8,
             std::to_string(g_converged.size()) + " converged fixed points, max |max_{s>=0} T - theta0| = " +
                 g6(worst));
      report("speed_bound", worst_ratio < 1.0 && min_psi > 0.0,
             std::to_string(g_converged.size()) + " runs, largest c / bound = " + g6(worst_ratio) + " (" +
                 worst_label + "), min psi_e = " + g6(min_psi));
    }

    progress("determinism");
    determinism_criterion();
  } catch (const std::exception& e) {
    report("acceptance_run", false, std::string("aborted: ") + e.what());
  }

  int failed = 0;
  for (const auto& l : g_lines) failed += l.pass ? 0 : 1;
  std::cout << "acceptance: " << g_lines.size() - failed << " of " << g_lines.size() << " criteria pass, "
            << fmt("%.0f s", seconds_since(t_all)) << std::endl;
  return failed == 0 ? 0 : 1;
}
