#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pulsefront/frontsolve.hpp"
#include "pulsefront/reaction.hpp"

namespace pulsefront {

enum class Verdict { pass, warn, fail, info };

const char* to_string(Verdict v);

/// One report line: measured value against its threshold.
struct DiagnosticEntry {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::info;
  std::string note;
};

struct DiagnosticsConfig {
  double reaction_tol = 1e-2;
  double energy_tol = 2e-2;
  double cross_section_tol = 2e-2;
  double normalization_tol = 1e-8;
  /// theta_+ tolerance, and the smallness-family distance of theta_- from 1.
  double tail_tol = 1e-3;
  double theta_one_tol = 1e-2;
  double decay_r2 = 0.99;
  /// Relative drift allowed between refinements or continuation stages.
  double stability = 0.2;
  /// Exponent alpha of the comparison eigenproblem.
  double eigen_alpha = 1.0;
  /// Divergence passes when ||div u||_L2 <= divergence_factor h^2 ||u||_L2.
  double divergence_factor = 10.0;
  bool smallness_family = false;
};

struct DecayFit {
  double slope = 0.0;
  double r2 = 0.0;
  double R = 0.0;     ///< left end of the window
  double R_end = 0.0; ///< right end
  double u_window = 0.0;  ///< sup |u| on the window
  int samples = 0;
};

struct CrossSection {
  std::vector<double> s, I, I_ss, G;
  double residual = 0.0;  ///< ||I_ss + G||_L2 / ||G||_L2
  double slope_left = 0.0, slope_right = 0.0;  ///< I_s(-a), I_s(a)
  bool monotone = false;
};

struct SpeedBound {
  double ratio = 0.0;  ///< c / (1 + eps + M + ||u|| (1 + ||grad psi / psi||))
  double M = 0.0;
  double u_sup = 0.0;
  double grad_log_psi = 0.0;
  double mu = 0.0;
  double min_psi = 0.0;
};

struct DiagnosticsReport {
  double c = 0.0, eps = 0.0, delta = 0.0, a = 0.0;
  double reaction_rate_residual = 0.0;
  double energy_residual = 0.0;
  double burning_product = 0.0;
  SpeedBound speed_bound;
  double vorticity_bound_ratio = 0.0;
  double theta_minus = 0.0, theta_plus = 0.0;
  DecayFit decay;
  CrossSection cross_section;
  double normalization_error = 0.0;
  double divergence_norm = 0.0;
  std::vector<double> c2_over_eps;  ///< along the eps schedule, when available
  std::optional<double> pulsating_mismatch;
  std::vector<DiagnosticEntry> entries;

  bool any_failed() const;
  const DiagnosticEntry* find(const std::string& name) const;
};

/// f(x, z, T) at every node.
GridField reaction_field(const GridField& T, const ReactionSpec& spec);

/// Relative residual of c |Omega_p| theta_- = int f on the finite slab. The
/// end fluxes (1 + eps) int T_s at s = -a, a replace the theta_- tail terms.
double reaction_rate_residual(const FrontSolution& sol, const ReactionSpec& spec);

/// Relative residual of
///   c |Omega_p| / 2 + (1 + eps) F(-a) + eps int T_s^2 + int |grad~ T|^2 = int T f
/// with F(s) the cross-section integral of T_s.
double energy_identity_residual(const FrontSolution& sol, const ReactionSpec& spec);

/// (int f)(int T_s^2).
double burning_product(const FrontSolution& sol, const ReactionSpec& spec);

SpeedBound speed_bound_report(const FrontSolution& sol, double M, double alpha = 1.0);

/// ||omega||_H1 on the extended slab over ||grad~ T||_L2 on the box; 0 when
/// the denominator vanishes.
double vorticity_bound_ratio(const FrontSolution& sol);

/// Log-linear fit of -d/ds max_{x,z} T against s on [R, a - ell], taking R = ell
/// unless given. Differencing removes the constant that the Dirichlet value at
/// s = a adds to a pure exponential tail.
DecayFit decay_fit(const GridField& T, const GridField* u1 = nullptr,
                   const GridField* u2 = nullptr, std::optional<double> R = std::nullopt);

/// I(s), I_ss and G(s) with
///   (1 + eps) |Omega_p| G = int (tau f - u . grad~ T + c T_s) + int_B eta_1 T_s dS.
CrossSection cross_section_profile(const FrontSolution& sol, const ReactionSpec& spec);

/// c^2 / eps for each (eps, c) pair.
std::vector<double> c2_over_eps(const std::vector<double>& eps, const std::vector<double>& c);

/// Bounded below by a positive value with no decreasing trend toward small eps.
bool c2_over_eps_ok(const std::vector<double>& series);

double divergence_norm(const FrontSolution& sol);

/// Every entry for a converged solution. `continuation` supplies the c^2/eps
/// series and the burning-product stability check when given.
DiagnosticsReport diagnose(const FrontSolution& sol, const ReactionSpec& spec,
                           const DiagnosticsConfig& cfg = {},
                           const ContinuationResult* continuation = nullptr);

/// Adds the pulsating-relation entry (threshold 0.05).
void attach_pulsating(DiagnosticsReport& report, double mismatch, double threshold = 0.05);

}  // namespace pulsefront
