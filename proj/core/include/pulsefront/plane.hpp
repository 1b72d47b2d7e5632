#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <vector>

#include "pulsefront/geometry.hpp"

namespace pulsefront {

/// Two-dimensional (x, sigma) grid over a cross-section of the strip. Either
/// one period with periodic columns, or several periods with Dirichlet end
/// columns at x = 0 and x = periods * ell.
class PlaneGrid {
 public:
  static PlaneGrid periodic_cell(const PeriodCell& cell);
  static PlaneGrid strip(const PeriodCell& cell, int periods);

  bool periodic() const { return periodic_; }
  int cols() const { return cols_; }
  int n_z() const { return n_z_; }
  int nz_nodes() const { return n_z_ + 1; }
  double h_x() const { return h_x_; }
  double h_sigma() const { return 1.0 / n_z_; }
  double ell() const { return ell_; }
  std::size_t size() const { return static_cast<std::size_t>(cols_) * nz_nodes(); }
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(wrap(j)) * nz_nodes() + static_cast<std::size_t>(k);
  }
  int wrap(int j) const {
    if (!periodic_) return j;
    const int m = j % cols_;
    return m < 0 ? m + cols_ : m;
  }

  double x(int j) const { return j * h_x_; }
  double sigma(int k) const { return static_cast<double>(k) / n_z_; }
  double z(int j, int k) const { return bottom_[wrap(j)] + sigma(k) * height(j); }
  double height(int j) const { return top_[wrap(j)] - bottom_[wrap(j)]; }
  double slope(int j, Wall w) const {
    return w == Wall::bottom ? bottom_slope_[wrap(j)] : top_slope_[wrap(j)];
  }
  const SigmaMetric& metric(int j, int k) const { return metric_[index(j, k)]; }
  std::array<double, 2> normal(int j, Wall w) const;
  double wall_gain(int j, Wall w) const;
  double wall_gain_slope(int j, Wall w) const;
  double wall_flux_gain(int j, Wall w) const;
  bool end_column(int j) const { return !periodic_ && (j == 0 || j == cols_ - 1); }

  /// Trapezoid in sigma (and in x for strips) times H.
  double integrate(const Eigen::VectorXd& g) const;
  /// |Omega(x_j)|^-1 int T dz for each column.
  std::vector<double> column_means(const Eigen::VectorXd& g) const;

 private:
  bool periodic_ = true;
  int cols_ = 0, n_z_ = 0;
  double h_x_ = 0.0, ell_ = 1.0;
  std::vector<double> bottom_, top_, bottom_slope_, top_slope_, bottom_curv_, top_curv_;
  std::vector<SigmaMetric> metric_;
  void build(const GeometryConfig& cfg);
};

enum class PlaneWall { dirichlet, robin };

/// A g = r g - nu Lap g + u1 g_x + u2 g_z on the plane grid, with
/// eta . grad g = kappa g + q on Robin walls.
struct PlaneOperator {
  double nu = 1.0;
  double r = 0.0;
  const Eigen::VectorXd* r_field = nullptr;
  double u1_const = 0.0;
  const Eigen::VectorXd* u1 = nullptr;
  const Eigen::VectorXd* u2 = nullptr;
  /// Positive-coefficient mixed stencil and first-order upwinding of every
  /// first-derivative term; gives an M-matrix when the walls are gentle.
  bool monotone = false;
};

struct PlaneBoundary {
  PlaneWall walls = PlaneWall::dirichlet;
  /// Per (column, wall) arrays indexed 2 * j + (top ? 1 : 0); null means zero.
  const std::vector<double>* kappa = nullptr;
  const std::vector<double>* q = nullptr;
  const std::vector<double>* wall_values = nullptr;
  double left = 0.0, right = 0.0;
};

struct PlaneSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<std::ptrdiff_t> unknown_of_node;
  std::vector<std::size_t> node_of_unknown;
  Eigen::VectorXd dirichlet_values;

  Eigen::VectorXd scatter(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gather(const Eigen::VectorXd& g) const;
};

PlaneSystem assemble_plane(const PlaneGrid& grid, const PlaneOperator& op, const PlaneBoundary& bc);

// Derivatives on the plane grid: centered inside, one-sided second order at
// walls and at strip ends.
Eigen::VectorXd plane_d_xi(const PlaneGrid& g, const Eigen::VectorXd& v);
Eigen::VectorXd plane_d_sigma(const PlaneGrid& g, const Eigen::VectorXd& v);

/// Physical (g_x, g_z).
std::array<Eigen::VectorXd, 2> plane_gradient(const PlaneGrid& g, const Eigen::VectorXd& v);

}  // namespace pulsefront
