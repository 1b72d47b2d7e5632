#include "pulsefront/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

constexpr double kPeriodicityTol = 1e-10;

}  // namespace

WallProfile WallProfile::fourier(double mean, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs, double ell,
                                 double shift) {
  if (!(ell > 0.0)) throw ConfigError("fourier wall: period must be positive");
  shift = std::fmod(shift, ell);
  const double k0 = 2.0 * std::numbers::pi / ell;
  auto eval = [=](double x, int order) {
    double acc = order == 0 ? mean : 0.0;
    const std::size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
    for (std::size_t m = 0; m < n; ++m) {
      const double k = k0 * static_cast<double>(m + 1);
      const double ph = k * (x + shift);
      const double ac = m < cos_coeffs.size() ? cos_coeffs[m] : 0.0;
      const double as = m < sin_coeffs.size() ? sin_coeffs[m] : 0.0;
      const double c = std::cos(ph), s = std::sin(ph);
      switch (order) {
        case 0: acc += ac * c + as * s; break;
        case 1: acc += k * (-ac * s + as * c); break;
        default: acc += -k * k * (ac * c + as * s); break;
      }
    }
    return acc;
  };
  return WallProfile{[eval](double x) { return eval(x, 0); },
                     [eval](double x) { return eval(x, 1); },
                     [eval](double x) { return eval(x, 2); }};
}

WallProfile WallProfile::flat(double level) {
  return WallProfile{[level](double) { return level; }, [](double) { return 0.0; },
                     [](double) { return 0.0; }};
}

PeriodCell::PeriodCell(const GeometryConfig& config)
    : config_(config),
      ell_(config.ell),
      half_width_(config.half_width),
      a_(config.a),
      gravity_angle_(config.gravity_angle),
      n_s_(config.n_s),
      n_x_(config.n_x),
      n_z_(config.n_z) {
  if (!(ell_ > 0.0)) throw ConfigError("geometry: ell must be positive");
  if (!(half_width_ > 0.0)) throw ConfigError("geometry: half_width must be positive");
  if (n_s_ < 4 || n_x_ < 4 || n_z_ < 4)
    throw ConfigError("geometry: grid counts must be at least 4 in every direction");
  if (n_s_ % 2 != 0) throw ConfigError("geometry: n_s must be even so that s = 0 is a node");
  if (!(a_ >= 2.0 * ell_)) throw ConfigError("geometry: moving-frame half extent a must be >= 2 ell");
  if (!config.bottom.value || !config.top.value || !config.bottom.slope || !config.top.slope ||
      !config.bottom.curvature || !config.top.curvature)
    throw ConfigError("geometry: wall profiles must provide value, slope and curvature");

  gravity_ = {std::sin(gravity_angle_), std::cos(gravity_angle_)};

  for (const auto* w : {&config.bottom, &config.top}) {
    const double m0 = std::abs(w->value(0.0) - w->value(ell_));
    const double m1 = std::abs(w->slope(0.0) - w->slope(ell_));
    if (m0 > kPeriodicityTol || m1 > kPeriodicityTol) {
      std::ostringstream os;
      os << "geometry: wall is not ell-periodic (mismatch " << std::max(m0, m1) << ")";
      throw ConfigError(os.str());
    }
  }

  bottom_.resize(n_x_);
  top_.resize(n_x_);
  bottom_slope_.resize(n_x_);
  top_slope_.resize(n_x_);
  bottom_curv_.resize(n_x_);
  top_curv_.resize(n_x_);
  for (int j = 0; j < n_x_; ++j) {
    const double x = x_node(j);
    bottom_[j] = config.bottom.value(x);
    top_[j] = config.top.value(x);
    bottom_slope_[j] = config.bottom.slope(x);
    top_slope_[j] = config.top.slope(x);
    bottom_curv_[j] = config.bottom.curvature(x);
    top_curv_[j] = config.top.curvature(x);
    if (!(top_[j] > bottom_[j])) {
      std::ostringstream os;
      os << "geometry: walls cross at x = " << x;
      throw ConfigError(os.str());
    }
    if (std::max(std::abs(top_[j]), std::abs(bottom_[j])) > half_width_) {
      std::ostringstream os;
      os << "geometry: wall leaves the band |z| <= " << half_width_ << " at x = " << x;
      throw ConfigError(os.str());
    }
    if (bottom_slope_[j] != 0.0 || top_slope_[j] != 0.0 || bottom_curv_[j] != 0.0 ||
        top_curv_[j] != 0.0)
      flat_ = false;
  }

  metric_.resize(static_cast<std::size_t>(n_x_) * nz_nodes());
  for (int j = 0; j < n_x_; ++j) {
    const double h = height(j);
    const double hp = top_slope_[j] - bottom_slope_[j];
    const double hpp = top_curv_[j] - bottom_curv_[j];
    for (int k = 0; k <= n_z_; ++k) {
      const double sg = sigma_node(k);
      const double num = bottom_slope_[j] + sg * hp;
      const double num_p = bottom_curv_[j] + sg * hpp;
      SigmaMetric m;
      m.jacobian = h;
      m.sigma_x = -num / h;
      m.sigma_x_xi = -(num_p * h - num * hp) / (h * h);
      m.sigma_x_sigma = -hp / h;
      metric_[j * nz_nodes() + k] = m;
    }
  }
}

double PeriodCell::z_node(int j, int k) const {
  return bottom(j) + sigma_node(k) * height(j);
}

std::array<double, 2> PeriodCell::normal(int j, Wall w) const {
  const double d = wall_slope(j, w);
  const double n = std::sqrt(1.0 + d * d);
  if (w == Wall::bottom) return {d / n, -1.0 / n};
  return {-d / n, 1.0 / n};
}

double PeriodCell::wall_gain(int j, Wall w) const {
  const double d = wall_slope(j, w);
  return height(j) * d / (1.0 + d * d);
}

double PeriodCell::wall_flux_gain(int j, Wall w) const {
  const double d = wall_slope(j, w);
  const double q = height(j) / std::sqrt(1.0 + d * d);
  return w == Wall::bottom ? -q : q;
}

double PeriodCell::wall_gain_slope(int j, Wall w) const {
  const int jj = wrap(j);
  const double d = wall_slope(jj, w);
  const double dd = w == Wall::bottom ? bottom_curv_[jj] : top_curv_[jj];
  const double hp = top_slope_[jj] - bottom_slope_[jj];
  const double q = 1.0 + d * d;
  return hp * d / q + height(jj) * dd * (1.0 - d * d) / (q * q);
}

BoundaryClass PeriodCell::classify(int j, int k) const {
  if (k == 0 || k == n_z_) return BoundaryClass::b_wall;
  if (wrap(j) == 0) return BoundaryClass::p_periodic;
  return BoundaryClass::interior;
}

BoundaryClass PeriodCell::classify(int i, int j, int k) const {
  if (i == 0) return BoundaryClass::s_left;
  if (i == n_s_) return BoundaryClass::s_right;
  return classify(j, k);
}

CellPtr build_period_cell(const GeometryConfig& config) {
  return std::make_shared<const PeriodCell>(config);
}

double sigma_weight(const PeriodCell& cell, int k) {
  const double h = cell.h_sigma();
  return (k == 0 || k == cell.n_z()) ? 0.5 * h : h;
}

double cell_measure(const PeriodCell& cell) {
  double area = 0.0;
  for (int j = 0; j < cell.n_x(); ++j) {
    double col = 0.0;
    for (int k = 0; k <= cell.n_z(); ++k) col += sigma_weight(cell, k);
    area += cell.h_x() * col * cell.height(j);
  }
  return area;
}

}  // namespace pulsefront
