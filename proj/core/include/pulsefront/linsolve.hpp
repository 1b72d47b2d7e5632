#pragma once

#include <Eigen/Sparse>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "pulsefront/fields.hpp"

namespace pulsefront {

enum class WallCondition { dirichlet, conormal };

/// Coefficients of
///   A g = -L_eps g - drift * g_s + u . grad~ g + r g
/// on the moving-frame grid. Pointers are borrowed for the duration of the call.
struct OperatorSpec {
  double eps = 0.0;
  double drift = 0.0;
  const GridField* u1 = nullptr;
  const GridField* u2 = nullptr;
  const Eigen::VectorXd* reaction = nullptr;  ///< one entry per grid node

  /// Il'in-Allen-Southwell fitting of the s-diffusion against the total
  /// s-advection. Exact at the nodes for s-only solutions of the constant
  /// coefficient problem; still second order in general.
  bool exponential_fitting = true;
  /// Blend of first-order upwinding for the x and sigma advection, in [0, 1].
  double upwind_blend = 0.0;
  /// Switch a node to full upwinding once its cell Peclet number passes this.
  double peclet_threshold = 2.0;
  bool auto_upwind = true;
};

struct BoundarySpec {
  WallCondition walls = WallCondition::dirichlet;
  /// Values at Dirichlet nodes (s-ends, and walls when walls == dirichlet).
  /// When null the ends take `left` / `right` and Dirichlet walls take 0.
  const GridField* dirichlet = nullptr;
  double left = 0.0;
  double right = 0.0;
  /// Conormal data q in eta . grad~ g = q, indexed by wall_flux_index.
  /// Null means homogeneous.
  const std::vector<double>* wall_flux = nullptr;
};

inline std::size_t wall_flux_index(const PeriodCell& c, int i, int j, Wall w) {
  return (static_cast<std::size_t>(i) * c.n_x() + static_cast<std::size_t>(c.wrap(j))) * 2 +
         (w == Wall::bottom ? 0 : 1);
}

/// Sparse system over the active (non-Dirichlet) nodes. Dirichlet nodes are
/// eliminated into the right-hand side.
struct LinearSystem {
  CellPtr cell;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<std::ptrdiff_t> unknown_of_node;  ///< -1 for eliminated nodes
  std::vector<std::size_t> node_of_unknown;
  GridField dirichlet_values;  ///< boundary data, zero at active nodes
  int upwinded_nodes = 0;

  Eigen::Index unknowns() const { return A.rows(); }
  GridField scatter(const Eigen::VectorXd& x, BcTag tag, double eps = 0.0) const;
  Eigen::VectorXd gather(const GridField& g) const;
};

LinearSystem assemble(const OperatorSpec& op, const BoundarySpec& bc, const CellPtr& cell);

enum class SolveMethod { automatic, direct, bicgstab };

const char* to_string(SolveMethod m);
SolveMethod solve_method_from_string(const std::string& name);

struct SolveOptions {
  SolveMethod method = SolveMethod::automatic;
  double tol = 1e-10;
  int max_iter = 4000;
  /// `automatic` factors directly below small_limit and otherwise runs the
  /// preconditioned Krylov iteration, falling back to direct elimination when
  /// it stalls on a system smaller than direct_limit.
  std::size_t small_limit = 8000;
  std::size_t direct_limit = 100000;
  double ilut_drop = 1e-2;
  int ilut_fill = 4;
};

struct ConvergenceRecord {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  ///< ||Ax - b|| / ||b||
  std::string method;
};

/// Factor once, solve many right-hand sides. Deterministic for fixed inputs.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  void compute(const Eigen::SparseMatrix<double>& A, const SolveOptions& opts = {});
  Eigen::VectorXd solve(const Eigen::VectorXd& b, ConvergenceRecord* record = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve of an assembled system. Throws SolverError on stall or NaN.
Eigen::VectorXd solve(const LinearSystem& sys, const SolveOptions& opts = {},
                      ConvergenceRecord* record = nullptr);
Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                      const SolveOptions& opts = {}, ConvergenceRecord* record = nullptr);

/// P coth P with the small-P series.
double fitting_factor(double p);

}  // namespace pulsefront
