#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <string>

#include "pulsefront/geometry.hpp"

namespace pulsefront {

enum class BcTag { temperature, vorticity, stream, velocity_component };

const char* to_string(BcTag tag);
BcTag bc_tag_from_string(const std::string& name);

/// Scalar field on the (s, x, sigma) nodes of a PeriodCell's moving-frame grid.
/// Storage is s-major: index = (i * n_x + j) * (n_z + 1) + k.
class GridField {
 public:
  GridField() = default;
  GridField(CellPtr cell, BcTag tag, double eps = 0.0, double fill = 0.0);

  const PeriodCell& cell() const { return *cell_; }
  const CellPtr& cell_ptr() const { return cell_; }
  BcTag tag() const { return tag_; }
  void set_tag(BcTag t) { tag_ = t; }
  double eps() const { return eps_; }
  void set_eps(double e) { eps_ = e; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * nx_ + static_cast<std::size_t>(cell_->wrap(j))) * nk_ +
           static_cast<std::size_t>(k);
  }
  double& operator()(int i, int j, int k) { return values_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return values_[index(i, j, k)]; }

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  bool empty() const { return values_.size() == 0; }

  /// Fill every node from a function of physical coordinates (s, x, z).
  template <class F>
  void fill_physical(F&& fn) {
    const PeriodCell& c = *cell_;
    for (int i = 0; i <= c.n_s(); ++i)
      for (int j = 0; j < c.n_x(); ++j)
        for (int k = 0; k <= c.n_z(); ++k)
          (*this)(i, j, k) = fn(c.s_node(i), c.x_node(j), c.z_node(j, k));
  }

  /// A field of the same shape with the given values (shape-checked).
  GridField like(Eigen::VectorXd values) const;

 private:
  CellPtr cell_;
  BcTag tag_ = BcTag::temperature;
  double eps_ = 0.0;
  std::size_t nx_ = 0, nk_ = 0;
  Eigen::VectorXd values_;
};

// Derivatives in computational coordinates. Centered in the interior,
// periodic in x, one-sided second order at s = +-a and at the walls.
GridField d_s(const GridField& g);
GridField d_xi(const GridField& g);
GridField d_sigma(const GridField& g);
GridField d_ss(const GridField& g);
GridField d_xixi(const GridField& g);
GridField d_sigmasigma(const GridField& g);

/// (D g, g_z) with D = d/ds + d/dx taken at fixed z.
std::array<GridField, 2> tilde_gradient(const GridField& g);

/// D v1 + d(v2)/dz.
GridField divergence_tilde(const GridField& v1, const GridField& v2);

/// e . (-g_z, D g).
GridField tilde_perp_dot_e(const GridField& g, std::array<double, 2> e);

/// D^2 g + g_zz + eps g_ss on the compact stencil.
GridField apply_L_epsilon(const GridField& g, double eps);

struct MollifierSpec {
  double delta = 0.0;
  /// Vertical support in sigma units is delta / reference_height. Zero means
  /// the mean height of the cell.
  double reference_height = 0.0;
};

/// Tensor product (1 - r^2)^3 kernel, each factor normalized to unit discrete
/// mass. Returns the 1D weights for offsets -m..m along an axis of spacing h.
std::vector<double> bump_weights(double radius, double h);

/// Convolution with the mollifier. Outside the box the field is continued by
/// extend_by_reflection in s, periodically in x, and across the walls by odd
/// reflection about the wall value (Dirichlet tags) or even reflection
/// (temperature).
GridField mollify(const GridField& g, const MollifierSpec& m);

/// Same convolution by brute-force 3D summation; used to cross-check mollify.
GridField mollify_direct(const GridField& g, const MollifierSpec& m);

/// Cell with the same cross-section and s-spacing, extended by margin on both
/// ends. The margin must be a whole number of s-steps.
CellPtr extended_cell(const PeriodCell& cell, double margin);

/// Continues g past s = -a and s = a by g(-a - r) = 2 g(-a) - g(-a + r) and the
/// mirror formula at s = a.
GridField extend_by_reflection(const GridField& g, double margin);
GridField extend_by_reflection(const GridField& g, const CellPtr& target);

/// Values of g on the sub-box of `target`, whose s-nodes must be a subset.
GridField restrict_to(const GridField& g, const CellPtr& target);

enum class NormKind { L2, H1_tilde, X };

/// Quadrature-weighted discrete norms. For NormKind::X the pair (i, j) caps
/// the s-derivative order at i and total order at j (j <= 2).
double norm(const GridField& g, NormKind kind, int i = 0, int j = 0);

/// Trapezoid in s and sigma, uniform in x, times H(x).
double integrate(const GridField& g);
double inner(const GridField& a, const GridField& b);

/// Cross-section integral at s-node i.
double integrate_section(const GridField& g, int i);

/// Max over nodes with s >= 0 and its flat index.
std::pair<double, std::size_t> max_right_half(const GridField& g);

}  // namespace pulsefront
