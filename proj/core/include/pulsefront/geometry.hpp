#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace pulsefront {

/// A wall z = w(x) of the periodic strip, with its first two derivatives.
struct WallProfile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::function<double(double)> curvature;

  /// Truncated Fourier series
  ///   w(x) = mean + sum_k cos_k cos(2 pi k (x + shift) / ell) + sin_k sin(...)
  /// The shift is reduced modulo ell so translating by whole periods is exact.
  static WallProfile fourier(double mean, std::vector<double> cos_coeffs,
                             std::vector<double> sin_coeffs, double ell,
                             double shift = 0.0);

  static WallProfile flat(double level);
};

struct GeometryConfig {
  double ell = 1.0;
  double half_width = 2.0;
  WallProfile bottom = WallProfile::flat(0.0);
  WallProfile top = WallProfile::flat(1.0);
  /// e_hat = (sin gravity_angle, cos gravity_angle).
  double gravity_angle = 0.0;
  int n_s = 128;
  int n_x = 16;
  int n_z = 16;
  double a = 8.0;
};

enum class BoundaryClass { interior, b_wall, p_periodic, s_left, s_right };

enum class Wall { bottom, top };

/// Terrain-following coordinates of one cross-section node:
/// z = bottom(x) + sigma * (top(x) - bottom(x)).
struct SigmaMetric {
  double jacobian;   ///< dz/dsigma = H(x)
  double sigma_x;    ///< dsigma/dx at fixed z
  double sigma_x_xi; ///< d(sigma_x)/dx at fixed sigma
  double sigma_x_sigma;  ///< d(sigma_x)/dsigma
};

/// Discretized period cell Omega_p together with the moving-frame box
/// [-a, a] x Omega_p. Immutable after construction.
///
/// Node layout: s_i = -a + i h_s, i = 0..n_s; x_j = j h_x, j = 0..n_x-1 with
/// x = ell identified with x = 0; sigma_k = k / n_z, k = 0..n_z.
class PeriodCell {
 public:
  explicit PeriodCell(const GeometryConfig& config);

  double ell() const { return ell_; }
  double half_width() const { return half_width_; }
  double a() const { return a_; }
  int n_s() const { return n_s_; }
  int n_x() const { return n_x_; }
  int n_z() const { return n_z_; }
  int nz_nodes() const { return n_z_ + 1; }
  double h_s() const { return 2.0 * a_ / n_s_; }
  double h_x() const { return ell_ / n_x_; }
  double h_sigma() const { return 1.0 / n_z_; }

  double s_node(int i) const { return -a_ + i * h_s(); }
  double x_node(int j) const { return j * h_x(); }
  double sigma_node(int k) const { return static_cast<double>(k) / n_z_; }
  double z_node(int j, int k) const;

  double bottom(int j) const { return bottom_[wrap(j)]; }
  double top(int j) const { return top_[wrap(j)]; }
  double height(int j) const { return top(j) - bottom(j); }
  double wall_value(int j, Wall w) const { return w == Wall::bottom ? bottom(j) : top(j); }
  double wall_slope(int j, Wall w) const {
    return w == Wall::bottom ? bottom_slope_[wrap(j)] : top_slope_[wrap(j)];
  }

  const SigmaMetric& metric(int j, int k) const { return metric_[wrap(j) * nz_nodes() + k]; }

  /// Outward unit normal (eta_1, eta_2) of wall w at column j.
  std::array<double, 2> normal(int j, Wall w) const;

  /// G such that the conormal condition eta . grad~ g = q at the wall reads
  /// g_sigma = G (g_s + g_xi) + Q q, with Q from wall_flux_gain.
  double wall_gain(int j, Wall w) const;
  double wall_flux_gain(int j, Wall w) const;
  /// Along-wall derivative dG/dx of wall_gain.
  double wall_gain_slope(int j, Wall w) const;

  /// e_hat, the rotated gravity direction.
  std::array<double, 2> gravity() const { return gravity_; }
  double gravity_angle() const { return gravity_angle_; }

  BoundaryClass classify(int j, int k) const;
  BoundaryClass classify(int i, int j, int k) const;

  bool is_flat() const { return flat_; }
  int wrap(int j) const {
    const int m = j % n_x_;
    return m < 0 ? m + n_x_ : m;
  }

  const GeometryConfig& config() const { return config_; }

 private:
  GeometryConfig config_;
  double ell_, half_width_, a_, gravity_angle_;
  int n_s_, n_x_, n_z_;
  std::array<double, 2> gravity_;
  std::vector<double> bottom_, top_, bottom_slope_, top_slope_;
  std::vector<double> bottom_curv_, top_curv_;
  std::vector<SigmaMetric> metric_;
  bool flat_ = true;
};

using CellPtr = std::shared_ptr<const PeriodCell>;

CellPtr build_period_cell(const GeometryConfig& config);

/// |Omega_p| with the same quadrature weights used for field integrals.
double cell_measure(const PeriodCell& cell);

/// Trapezoid weight of sigma node k (sums to one over k).
double sigma_weight(const PeriodCell& cell, int k);

}  // namespace pulsefront
