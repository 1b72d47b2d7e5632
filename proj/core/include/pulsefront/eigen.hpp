#pragma once

#include <Eigen/Core>

#include "pulsefront/fields.hpp"
#include "pulsefront/plane.hpp"

namespace pulsefront {

/// -Lap psi + 2 alpha drift_sign psi_x = mu psi on one period cell, periodic in
/// x, with eta . grad psi = robin_sign alpha eta_1 psi on the walls.
struct EigenProblem {
  CellPtr cell;
  double alpha = 1.0;
  int drift_sign = 1;
  int robin_sign = 1;
  double tol = 1e-10;
  int max_iter = 500;
};

struct EigenPair {
  double mu = 0.0;
  Eigen::VectorXd psi;  ///< plane-grid ordering, sup norm 1
  double residual = 0.0;  ///< ||A psi - mu psi||_inf
  double min_psi = 0.0;
  double grad_log_sup = 0.0;  ///< ||grad psi / psi||_inf
  int iterations = 0;
};

/// Shifted inverse power iteration on A + I. Throws SolverError when the
/// iteration stalls or the limit vector changes sign.
EigenPair principal_eigenpair(const EigenProblem& problem);

/// gamma(s, x, z) = A exp(-alpha (s - R)) psi(x, z) on the cell's grid.
GridField comparison_envelope(const CellPtr& cell, double A, double alpha,
                              const Eigen::VectorXd& psi, double R);

/// Exact solution of -c T_s = (1 + eps) T_ss on [-a, a] with T(-a) = 1, T(a) = 0.
double phi_c(double s, double c, double a, double eps = 0.0);

/// Root of phi_c(0) = theta0 by bisection on [-c_max, c_max].
double c_star(double theta0, double a, double eps = 0.0, double c_max = 10.0,
              double tol = 1e-12);

}  // namespace pulsefront
