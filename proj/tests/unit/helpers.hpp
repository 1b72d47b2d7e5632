#pragma once

#include "pulsefront/geometry.hpp"

namespace pulsefront::testing {

inline GeometryConfig flat_geometry(int n_s, int n_x, int n_z, double a) {
  GeometryConfig g;
  g.n_s = n_s;
  g.n_x = n_x;
  g.n_z = n_z;
  g.a = a;
  return g;
}

/// Bottom 0.05 cos(2 pi x), top 1 + 0.1 sin(2 pi x).
inline GeometryConfig wavy_geometry(int n_s, int n_x, int n_z, double a) {
  GeometryConfig g = flat_geometry(n_s, n_x, n_z, a);
  g.bottom = WallProfile::fourier(0.0, {0.05}, {}, 1.0);
  g.top = WallProfile::fourier(1.0, {}, {0.1}, 1.0);
  return g;
}

}  // namespace pulsefront::testing
