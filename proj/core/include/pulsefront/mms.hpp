#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pulsefront/geometry.hpp"
#include "pulsefront/linsolve.hpp"

namespace pulsefront {

/// One factor of a separable term: value and first two derivatives.
struct Factor1D {
  std::function<std::array<double, 3>(double)> eval;
  static Factor1D cosine(double k, double phase = 0.0, double amp = 1.0);
  static Factor1D polynomial(std::vector<double> coeffs);
  static Factor1D constant(double v);
};

/// g(s, x, z) = sum_m A_m(s) B_m(x) C_m(z), in physical coordinates, so
/// derivatives are exact and independent of the sigma mapping.
struct ManufacturedSolution {
  struct Term {
    Factor1D a, b, c;
  };
  std::vector<Term> terms;

  struct Jet {
    double g, gs, gx, gz, gss, gsx, gxx, gzz, gsz, gxz;
  };
  Jet jet(double s, double x, double z) const;

  /// D^2 g + g_zz + eps g_ss.
  double L_epsilon(double s, double x, double z, double eps) const;

  /// Smooth, x-periodic default with genuine s, x and z coupling.
  static ManufacturedSolution standard(double ell);
};

enum class MmsRow { L_epsilon, omega, psi, temperature };
const char* to_string(MmsRow r);

struct MmsLevel {
  int n_s, n_x, n_z;
  double h;      ///< s-spacing
  double error;  ///< relative discrete L2 error
};

struct MmsResult {
  MmsRow row;
  bool wavy;
  std::vector<MmsLevel> levels;
  std::vector<double> orders;  ///< log2 of successive error ratios
};

struct MmsOptions {
  double eps = 0.1;
  double drift = 0.6;
  double a = 2.0;
  int base_n_s = 16, base_n_x = 8, base_n_z = 8;
  int refinements = 2;
  SolveOptions linear{};
};

/// Flat unit strip or the standard wavy cell (top wall 1 + 0.1 sin 2 pi x).
GeometryConfig mms_geometry(bool wavy, int n_s, int n_x, int n_z, double a);

MmsResult run_mms(MmsRow row, bool wavy, const MmsOptions& opts = {});

}  // namespace pulsefront
