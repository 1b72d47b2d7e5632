#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pulsefront/fields.hpp"
#include "pulsefront/linsolve.hpp"
#include "pulsefront/reaction.hpp"

namespace pulsefront {

enum class IterationMethod { newton, picard };

const char* to_string(IterationMethod m);
IterationMethod iteration_method_from_string(const std::string& name);

struct SolverConfig {
  double eps = 0.02;
  /// Mollifier radius in units of h_s.
  double delta_factor = 3.0;
  /// sigma_b, multiplier on the buoyancy forcing.
  double buoyancy = 1.0;
  WallCondition walls = WallCondition::conormal;

  int homotopy_steps = 4;
  /// Speed update weight rho of the literal map (picard only).
  double relaxation = 0.5;
  IterationMethod method = IterationMethod::newton;
  double tol = 1e-10;
  /// Looser stopping tolerance at the intermediate homotopy stages.
  double homotopy_tol = 1e-6;
  int max_iter = 200;

  std::vector<double> eps_schedule{0.16, 0.08, 0.04, 0.02};
  std::vector<double> delta_schedule{8.0, 4.0, 2.0};  ///< units of h_s
  std::vector<double> a_schedule{8.0, 16.0};          ///< units of ell
  bool warm_start = true;

  SolveOptions linear{};
  /// 0 silent, 1 one line per iteration on stderr.
  int verbosity = 0;

  void validate() const;
};

struct ResidualEntry {
  double tau;
  double dT;  ///< ||T_{k+1} - T_k||_inf
  double dc;  ///< |c_{k+1} - c_k|
};

struct FrontSolution {
  double c = 0.0;
  GridField T;      ///< on [-a, a]
  GridField omega;  ///< on the extended slab [-a - 2 ell, a + 2 ell]
  GridField psi;    ///< extended slab
  GridField u1, u2; ///< on [-a, a]
  double tau = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double theta_minus = 0.0, theta_plus = 0.0;
  std::vector<ResidualEntry> history;
  int iterations = 0;
  bool converged = false;
  /// ||S_1(c, T) - (c, T)|| evaluated once after convergence.
  double fixed_point_residual = 0.0;

  const PeriodCell& cell() const { return T.cell(); }
};

/// Mean of g over the s-slab [s0, s1] (node-aligned, trapezoid weights).
double slab_mean(const GridField& g, double s0, double s1);

/// -c T_s - L_eps T = 0 with T(-a) = 1, T(a) = 0 and the configured walls.
GridField solve_T0c(double c, const CellPtr& cell, double eps,
                    WallCondition walls = WallCondition::conormal,
                    const SolveOptions& linear = {});

/// Flow driven by Z: vorticity solve on the extended slab, mollification,
/// stream function, velocity restricted back to [-a, a].
struct Flow {
  GridField omega, psi, u1, u2;
};
Flow compute_flow(const GridField& Z, double c, double tau, const SolverConfig& cfg);

/// One literal sweep of the map: flow from Z = state.T, temperature solve with
/// tau f(Z), and c <- c + rho (theta0 - max_{s >= 0} Z).
FrontSolution apply_S_tau(const FrontSolution& state, const ReactionSpec& spec,
                          const SolverConfig& cfg);

/// Starting point at tau = 0: (c_*, T_0^{c_*}) with zero flow.
FrontSolution initial_state(const CellPtr& cell, const ReactionSpec& spec, const SolverConfig& cfg);

/// Homotopy in tau from `initial` to 1. Throws SolverError with the residual
/// history when a stage fails to converge.
FrontSolution fixed_point_solve(const SolverConfig& cfg, const ReactionSpec& spec,
                                const FrontSolution& initial);
FrontSolution fixed_point_solve(const SolverConfig& cfg, const ReactionSpec& spec,
                                const CellPtr& cell);

struct ContinuationStage {
  std::string parameter;  ///< "eps", "delta" or "a"
  double value = 0.0;
  bool ok = false;
  std::string error;
  double c = 0.0;
  double theta_minus = 0.0;
  int iterations = 0;
  FrontSolution solution;
};

struct ContinuationResult {
  std::vector<ContinuationStage> stages;
  /// Richardson extrapolation of the last two eps stages to eps = 0.
  double c_extrapolated = 0.0;
  bool speed_positive = false;
};

/// Warm-started solves along the eps, delta and a schedules. Stage failures
/// are recorded and the remaining stages of that schedule skipped.
ContinuationResult continuation_run(const SolverConfig& cfg, const ReactionSpec& spec,
                                    const GeometryConfig& geometry,
                                    const std::function<void(const ContinuationStage&)>& on_stage = {});

/// Warm start for a longer box: T on the old box, 1 to the left, 0 to the right.
FrontSolution extend_box(const FrontSolution& sol, const CellPtr& larger);

/// T(t, x, z) = T^m(x - c t, x, z) and u on the columns x_lo + j h_x,
/// j = 0..cols-1, by cubic interpolation in s.
struct StationaryFrame {
  double t = 0.0;
  std::vector<double> x;
  int nz_nodes = 0;
  std::vector<double> z;  ///< (column, k)
  std::vector<double> T, u1, u2;
};
StationaryFrame to_stationary_frame(const FrontSolution& sol, double t, double x_lo, int cols);

}  // namespace pulsefront
