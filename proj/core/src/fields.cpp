#include "pulsefront/fields.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

const char* to_string(BcTag tag) {
  switch (tag) {
    case BcTag::temperature: return "temperature";
    case BcTag::vorticity: return "vorticity";
    case BcTag::stream: return "stream";
    case BcTag::velocity_component: return "velocity_component";
  }
  return "temperature";
}

BcTag bc_tag_from_string(const std::string& name) {
  if (name == "temperature") return BcTag::temperature;
  if (name == "vorticity") return BcTag::vorticity;
  if (name == "stream") return BcTag::stream;
  if (name == "velocity_component") return BcTag::velocity_component;
  throw SchemaError("unknown bc_tag '" + name + "'");
}

GridField::GridField(CellPtr cell, BcTag tag, double eps, double fill)
    : cell_(std::move(cell)), tag_(tag), eps_(eps) {
  nx_ = static_cast<std::size_t>(cell_->n_x());
  nk_ = static_cast<std::size_t>(cell_->nz_nodes());
  values_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>((cell_->n_s() + 1) * nx_ * nk_), fill);
}

GridField GridField::like(Eigen::VectorXd values) const {
  if (values.size() != values_.size()) throw Error("GridField::like: size mismatch");
  GridField out = *this;
  out.values_ = std::move(values);
  return out;
}

namespace {

struct Shape {
  int ns, nx, nk;
  std::size_t si, sj;  // strides of i and j; k has stride 1
};

Shape shape_of(const PeriodCell& c) {
  const int nk = c.nz_nodes();
  return {c.n_s() + 1, c.n_x(), nk, static_cast<std::size_t>(c.n_x()) * nk,
          static_cast<std::size_t>(nk)};
}

// First derivative along a non-periodic line of n nodes.
inline double line_d1(const double* p, std::ptrdiff_t st, int n, int i, double h) {
  if (i == 0) return (-3.0 * p[0] + 4.0 * p[st] - p[2 * st]) / (2.0 * h);
  if (i == n - 1) return (3.0 * p[i * st] - 4.0 * p[(i - 1) * st] + p[(i - 2) * st]) / (2.0 * h);
  return (p[(i + 1) * st] - p[(i - 1) * st]) / (2.0 * h);
}

inline double line_d2(const double* p, std::ptrdiff_t st, int n, int i, double h) {
  const double h2 = h * h;
  if (i == 0) return (2.0 * p[0] - 5.0 * p[st] + 4.0 * p[2 * st] - p[3 * st]) / h2;
  if (i == n - 1)
    return (2.0 * p[i * st] - 5.0 * p[(i - 1) * st] + 4.0 * p[(i - 2) * st] - p[(i - 3) * st]) / h2;
  return (p[(i + 1) * st] - 2.0 * p[i * st] + p[(i - 1) * st]) / h2;
}

enum class Axis { s, xi, sigma };

GridField derivative(const GridField& g, Axis axis, int order) {
  const PeriodCell& c = g.cell();
  const Shape sh = shape_of(c);
  GridField out = g.like(Eigen::VectorXd::Zero(g.values().size()));
  const double* in = g.values().data();
  double* o = out.values().data();
  switch (axis) {
    case Axis::s: {
      const double h = c.h_s();
      for (int j = 0; j < sh.nx; ++j)
        for (int k = 0; k < sh.nk; ++k) {
          const double* p = in + j * sh.sj + k;
          for (int i = 0; i < sh.ns; ++i)
            o[i * sh.si + j * sh.sj + k] = order == 1 ? line_d1(p, sh.si, sh.ns, i, h)
                                                      : line_d2(p, sh.si, sh.ns, i, h);
        }
      break;
    }
    case Axis::xi: {
      const double h = c.h_x();
      for (int i = 0; i < sh.ns; ++i)
        for (int j = 0; j < sh.nx; ++j) {
          const int jp = c.wrap(j + 1), jm = c.wrap(j - 1);
          for (int k = 0; k < sh.nk; ++k) {
            const double gp = in[i * sh.si + jp * sh.sj + k];
            const double gm = in[i * sh.si + jm * sh.sj + k];
            const double g0 = in[i * sh.si + j * sh.sj + k];
            o[i * sh.si + j * sh.sj + k] =
                order == 1 ? (gp - gm) / (2.0 * h) : (gp - 2.0 * g0 + gm) / (h * h);
          }
        }
      break;
    }
    case Axis::sigma: {
      const double h = c.h_sigma();
      for (int i = 0; i < sh.ns; ++i)
        for (int j = 0; j < sh.nx; ++j) {
          const double* p = in + i * sh.si + j * sh.sj;
          for (int k = 0; k < sh.nk; ++k)
            o[i * sh.si + j * sh.sj + k] =
                order == 1 ? line_d1(p, 1, sh.nk, k, h) : line_d2(p, 1, sh.nk, k, h);
        }
      break;
    }
  }
  return out;
}

}  // namespace

GridField d_s(const GridField& g) { return derivative(g, Axis::s, 1); }
GridField d_xi(const GridField& g) { return derivative(g, Axis::xi, 1); }
GridField d_sigma(const GridField& g) { return derivative(g, Axis::sigma, 1); }
GridField d_ss(const GridField& g) { return derivative(g, Axis::s, 2); }
GridField d_xixi(const GridField& g) { return derivative(g, Axis::xi, 2); }
GridField d_sigmasigma(const GridField& g) { return derivative(g, Axis::sigma, 2); }

std::array<GridField, 2> tilde_gradient(const GridField& g) {
  const PeriodCell& c = g.cell();
  GridField gs = d_s(g), gx = d_xi(g), gz = d_sigma(g);
  GridField D = g.like(Eigen::VectorXd::Zero(g.values().size()));
  GridField Z = D;
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j) {
      const double invh = 1.0 / c.height(j);
      for (int k = 0; k <= c.n_z(); ++k) {
        const std::size_t n = g.index(i, j, k);
        const double sx = c.metric(j, k).sigma_x;
        D.values()[n] = gs.values()[n] + gx.values()[n] + sx * gz.values()[n];
        Z.values()[n] = gz.values()[n] * invh;
      }
    }
  return {std::move(D), std::move(Z)};
}

GridField divergence_tilde(const GridField& v1, const GridField& v2) {
  auto a = tilde_gradient(v1);
  auto b = tilde_gradient(v2);
  return v1.like(a[0].values() + b[1].values());
}

GridField tilde_perp_dot_e(const GridField& g, std::array<double, 2> e) {
  auto gr = tilde_gradient(g);
  return g.like(-e[0] * gr[1].values() + e[1] * gr[0].values());
}

GridField apply_L_epsilon(const GridField& g, double eps) {
  const PeriodCell& c = g.cell();
  const GridField gs = d_s(g), gss = d_ss(g), gxx = d_xixi(g), gzz = d_sigmasigma(g);
  const GridField gz = d_sigma(g);
  const GridField gsx = d_xi(gs), gsz = d_sigma(gs), gxz = d_sigma(d_xi(g));
  GridField out = g.like(Eigen::VectorXd::Zero(g.values().size()));
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j) {
      const double h = c.height(j);
      for (int k = 0; k <= c.n_z(); ++k) {
        const std::size_t n = g.index(i, j, k);
        const SigmaMetric& m = c.metric(j, k);
        const double sx = m.sigma_x;
        out.values()[n] = (1.0 + eps) * gss.values()[n] + 2.0 * gsx.values()[n] + gxx.values()[n] +
                          2.0 * sx * (gsz.values()[n] + gxz.values()[n]) +
                          (sx * sx + 1.0 / (h * h)) * gzz.values()[n] +
                          (m.sigma_x_xi + sx * m.sigma_x_sigma) * gz.values()[n];
      }
    }
  return out;
}

std::vector<double> bump_weights(double radius, double h) {
  if (!(h > 0.0)) throw ConfigError("bump_weights: spacing must be positive");
  if (radius <= 0.0) return {1.0};
  const int m = static_cast<int>(std::floor(radius / h * (1.0 - 1e-12)));
  std::vector<double> w(2 * m + 1);
  double sum = 0.0;
  for (int q = -m; q <= m; ++q) {
    const double r = q * h / radius;
    const double b = 1.0 - r * r;
    w[q + m] = b > 0.0 ? b * b * b : 0.0;
    sum += w[q + m];
  }
  for (double& x : w) x /= sum;
  return w;
}

namespace {

bool odd_in_sigma(BcTag tag) { return tag == BcTag::vorticity || tag == BcTag::stream; }

// Index-level continuation rules shared by the fast and the direct mollifier.
inline double reflect_line(const double* p, std::ptrdiff_t st, int n, int q, bool odd) {
  if (q < 0) return odd ? 2.0 * p[0] - p[-q * st] : p[-q * st];
  if (q >= n) {
    const int r = 2 * (n - 1) - q;
    return odd ? 2.0 * p[(n - 1) * st] - p[r * st] : p[r * st];
  }
  return p[q * st];
}

struct KernelSet {
  std::vector<double> ws, wx, wz;
  int ms, mx, mz;
};

KernelSet kernels_for(const PeriodCell& c, const MollifierSpec& m) {
  if (m.delta < 0.0) throw ConfigError("mollifier: delta must be non-negative");
  if (m.delta > c.ell()) {
    std::ostringstream os;
    os << "mollifier: support radius " << m.delta << " exceeds the period " << c.ell();
    throw ConfigError(os.str());
  }
  const double href = m.reference_height > 0.0 ? m.reference_height : cell_measure(c) / c.ell();
  KernelSet k;
  k.ws = bump_weights(m.delta, c.h_s());
  k.wx = bump_weights(m.delta, c.h_x());
  k.wz = bump_weights(m.delta / href, c.h_sigma());
  k.ms = static_cast<int>(k.ws.size() / 2);
  k.mx = static_cast<int>(k.wx.size() / 2);
  k.mz = static_cast<int>(k.wz.size() / 2);
  if (k.ms > c.n_s() || k.mz > c.n_z())
    throw ConfigError("mollifier: support wider than the box it reflects across");
  return k;
}

}  // namespace

GridField mollify(const GridField& g, const MollifierSpec& m) {
  const PeriodCell& c = g.cell();
  const KernelSet k = kernels_for(c, m);
  const Shape sh = shape_of(c);
  const bool odd_z = odd_in_sigma(g.tag());
  Eigen::VectorXd a = g.values(), b(a.size());

  // s pass (odd about the end values)
  for (int j = 0; j < sh.nx; ++j)
    for (int kk = 0; kk < sh.nk; ++kk) {
      const double* p = a.data() + j * sh.sj + kk;
      for (int i = 0; i < sh.ns; ++i) {
        double acc = 0.0;
        for (int q = -k.ms; q <= k.ms; ++q)
          acc += k.ws[q + k.ms] * reflect_line(p, sh.si, sh.ns, i + q, true);
        b[i * sh.si + j * sh.sj + kk] = acc;
      }
    }
  // x pass (periodic)
  for (int i = 0; i < sh.ns; ++i)
    for (int j = 0; j < sh.nx; ++j)
      for (int kk = 0; kk < sh.nk; ++kk) {
        double acc = 0.0;
        for (int q = -k.mx; q <= k.mx; ++q)
          acc += k.wx[q + k.mx] * b[i * sh.si + c.wrap(j + q) * sh.sj + kk];
        a[i * sh.si + j * sh.sj + kk] = acc;
      }
  // sigma pass
  for (int i = 0; i < sh.ns; ++i)
    for (int j = 0; j < sh.nx; ++j) {
      const double* p = a.data() + i * sh.si + j * sh.sj;
      for (int kk = 0; kk < sh.nk; ++kk) {
        double acc = 0.0;
        for (int q = -k.mz; q <= k.mz; ++q)
          acc += k.wz[q + k.mz] * reflect_line(p, 1, sh.nk, kk + q, odd_z);
        b[i * sh.si + j * sh.sj + kk] = acc;
      }
    }
  return g.like(std::move(b));
}

GridField mollify_direct(const GridField& g, const MollifierSpec& m) {
  const PeriodCell& c = g.cell();
  const KernelSet k = kernels_for(c, m);
  const Shape sh = shape_of(c);
  const bool odd_z = odd_in_sigma(g.tag());
  const Eigen::VectorXd& v = g.values();

  // Value at an arbitrary index triple, continuing in s first, then sigma.
  auto value = [&](int i, int j, int kk) {
    auto in_sigma = [&](int ii) {
      const double* p = v.data() + ii * sh.si + c.wrap(j) * sh.sj;
      return reflect_line(p, 1, sh.nk, kk, odd_z);
    };
    if (i < 0) return 2.0 * in_sigma(0) - in_sigma(-i);
    if (i >= sh.ns) return 2.0 * in_sigma(sh.ns - 1) - in_sigma(2 * (sh.ns - 1) - i);
    return in_sigma(i);
  };

  GridField out = g.like(Eigen::VectorXd::Zero(v.size()));
  for (int i = 0; i < sh.ns; ++i)
    for (int j = 0; j < sh.nx; ++j)
      for (int kk = 0; kk < sh.nk; ++kk) {
        double acc = 0.0;
        for (int a = -k.ms; a <= k.ms; ++a)
          for (int b = -k.mx; b <= k.mx; ++b)
            for (int d = -k.mz; d <= k.mz; ++d)
              acc += k.ws[a + k.ms] * k.wx[b + k.mx] * k.wz[d + k.mz] * value(i + a, j + b, kk + d);
        out(i, j, kk) = acc;
      }
  return out;
}

CellPtr extended_cell(const PeriodCell& cell, double margin) {
  const double steps = margin / cell.h_s();
  const double r = std::round(steps);
  if (margin < 0.0 || std::abs(steps - r) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream os;
    os << "extended_cell: margin " << margin << " is not a whole number of s-steps " << cell.h_s();
    throw ConfigError(os.str());
  }
  GeometryConfig cfg = cell.config();
  cfg.n_s = cell.n_s() + 2 * static_cast<int>(r);
  cfg.a = cell.a() + margin;
  return build_period_cell(cfg);
}

namespace {

int s_offset(const PeriodCell& big, const PeriodCell& small) {
  const double steps = (big.a() - small.a()) / small.h_s();
  const double r = std::round(steps);
  if (std::abs(big.h_s() - small.h_s()) > 1e-12 * small.h_s() || std::abs(steps - r) > 1e-9)
    throw Error("s-grids are not nested");
  return static_cast<int>(r);
}

}  // namespace

GridField extend_by_reflection(const GridField& g, const CellPtr& target) {
  const PeriodCell& c = g.cell();
  const int off = s_offset(*target, c);
  const int n = c.n_s();
  if (off > n) throw ConfigError("extend_by_reflection: margin exceeds the slab width 2a");
  GridField out(target, g.tag(), g.eps());
  for (int ii = 0; ii <= target->n_s(); ++ii) {
    const int i = ii - off;
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) {
        double v;
        if (i < 0)
          v = 2.0 * g(0, j, k) - g(-i, j, k);
        else if (i > n)
          v = 2.0 * g(n, j, k) - g(2 * n - i, j, k);
        else
          v = g(i, j, k);
        out(ii, j, k) = v;
      }
  }
  return out;
}

GridField extend_by_reflection(const GridField& g, double margin) {
  return extend_by_reflection(g, extended_cell(g.cell(), margin));
}

GridField restrict_to(const GridField& g, const CellPtr& target) {
  const int off = s_offset(g.cell(), *target);
  GridField out(target, g.tag(), g.eps());
  const std::size_t plane = static_cast<std::size_t>(target->n_x()) * target->nz_nodes();
  out.values() = g.values().segment(static_cast<Eigen::Index>(off * plane),
                                    static_cast<Eigen::Index>(out.size()));
  return out;
}

double integrate_section(const GridField& g, int i) {
  const PeriodCell& c = g.cell();
  double acc = 0.0;
  for (int j = 0; j < c.n_x(); ++j) {
    double col = 0.0;
    for (int k = 0; k <= c.n_z(); ++k) col += sigma_weight(c, k) * g(i, j, k);
    acc += c.h_x() * c.height(j) * col;
  }
  return acc;
}

double integrate(const GridField& g) {
  const PeriodCell& c = g.cell();
  double acc = 0.0;
  for (int i = 0; i <= c.n_s(); ++i) {
    const double w = (i == 0 || i == c.n_s()) ? 0.5 * c.h_s() : c.h_s();
    acc += w * integrate_section(g, i);
  }
  return acc;
}

double inner(const GridField& a, const GridField& b) {
  return integrate(a.like(a.values().cwiseProduct(b.values())));
}

double norm(const GridField& g, NormKind kind, int i, int j) {
  auto sq = [](const GridField& f) { return inner(f, f); };
  switch (kind) {
    case NormKind::L2: return std::sqrt(sq(g));
    case NormKind::H1_tilde: {
      auto gr = tilde_gradient(g);
      return std::sqrt(sq(g) + sq(gr[0]) + sq(gr[1]));
    }
    case NormKind::X: break;
  }
  if (i > j) throw ConfigError("X norm: s-derivative order exceeds total order");
  if (i < 0 || j > 2) throw ConfigError("X norm: supported orders are 0 <= i <= j <= 2");
  const PeriodCell& c = g.cell();
  // Physical partials (s, x, z) assembled from computational ones.
  const GridField gs = d_s(g), gx = d_xi(g), gz = d_sigma(g);
  double total = sq(g);
  if (j == 0) return std::sqrt(total);
  GridField px = g, pz = g;
  for (int a = 0; a <= c.n_s(); ++a)
    for (int b = 0; b < c.n_x(); ++b)
      for (int k = 0; k <= c.n_z(); ++k) {
        const std::size_t n = g.index(a, b, k);
        px.values()[n] = gx.values()[n] + c.metric(b, k).sigma_x * gz.values()[n];
        pz.values()[n] = gz.values()[n] / c.height(b);
      }
  total += sq(px) + sq(pz);
  if (i >= 1) total += sq(gs);
  if (j == 1) return std::sqrt(total);
  const GridField gxx = d_xixi(g), gzz = d_sigmasigma(g), gxz = d_sigma(gx);
  GridField pxx = g, pxz = g, pzz = g;
  for (int a = 0; a <= c.n_s(); ++a)
    for (int b = 0; b < c.n_x(); ++b) {
      const double h = c.height(b);
      const double hp = c.wall_slope(b, Wall::top) - c.wall_slope(b, Wall::bottom);
      for (int k = 0; k <= c.n_z(); ++k) {
        const std::size_t n = g.index(a, b, k);
        const SigmaMetric& m = c.metric(b, k);
        const double sx = m.sigma_x;
        pxx.values()[n] = gxx.values()[n] + 2.0 * sx * gxz.values()[n] + sx * sx * gzz.values()[n] +
                          (m.sigma_x_xi + sx * m.sigma_x_sigma) * gz.values()[n];
        pxz.values()[n] = (gxz.values()[n] + sx * gzz.values()[n]) / h - hp / (h * h) * gz.values()[n];
        pzz.values()[n] = gzz.values()[n] / (h * h);
      }
    }
  total += sq(pxx) + sq(pxz) + sq(pzz);
  if (i >= 1) {
    const GridField gsx = d_xi(gs), gsz = d_sigma(gs);
    GridField psx = g, psz = g;
    for (int a = 0; a <= c.n_s(); ++a)
      for (int b = 0; b < c.n_x(); ++b)
        for (int k = 0; k <= c.n_z(); ++k) {
          const std::size_t n = g.index(a, b, k);
          psx.values()[n] = gsx.values()[n] + c.metric(b, k).sigma_x * gsz.values()[n];
          psz.values()[n] = gsz.values()[n] / c.height(b);
        }
    total += sq(psx) + sq(psz);
  }
  if (i >= 2) total += sq(d_ss(g));
  return std::sqrt(total);
}

std::pair<double, std::size_t> max_right_half(const GridField& g) {
  const PeriodCell& c = g.cell();
  double best = -std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (int i = c.n_s() / 2; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) {
        const std::size_t n = g.index(i, j, k);
        if (g.values()[n] > best) {
          best = g.values()[n];
          at = n;
        }
      }
  return {best, at};
}

}  // namespace pulsefront
