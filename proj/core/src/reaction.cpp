#include "pulsefront/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

const char* to_string(ReactionProfile p) {
  return p == ReactionProfile::smallness ? "smallness" : "cubic_ignition";
}

ReactionProfile reaction_profile_from_string(const std::string& name) {
  if (name == "cubic_ignition") return ReactionProfile::cubic_ignition;
  if (name == "smallness") return ReactionProfile::smallness;
  throw ConfigError("unknown reaction profile '" + name + "'");
}

double ReactionSpec::modulation(double x) const {
  return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * x / ell + phase);
}

bool ReactionSpec::vanishes() const {
  return profile == ReactionProfile::cubic_ignition ? kappa == 0.0 : c_omega == 0.0;
}

double evaluate(const ReactionSpec& sp, double x, double, double T) {
  const double d = T - sp.theta0;
  if (d <= 0.0) return 0.0;
  if (sp.profile == ReactionProfile::cubic_ignition)
    return sp.modulation(x) * sp.kappa * d * d * d * (1.0 - T);
  return T >= 1.0 ? 0.0 : sp.c_omega * std::pow(d, sp.power) * (1.0 - T);
}

double evaluate_dT(const ReactionSpec& sp, double x, double, double T) {
  const double d = T - sp.theta0;
  if (d <= 0.0) return 0.0;
  if (sp.profile == ReactionProfile::cubic_ignition)
    return sp.modulation(x) * sp.kappa * (3.0 * d * d * (1.0 - T) - d * d * d);
  if (T >= 1.0) return 0.0;
  return sp.c_omega * (sp.power * std::pow(d, sp.power - 1.0) * (1.0 - T) - std::pow(d, sp.power));
}

void ReactionSpec::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("reaction: " + m); };
  if (!(theta0 > 0.0 && theta0 < 1.0)) fail("theta0 must lie in (0, 1)");
  if (!(theta0 < r1 && r1 < r2 && r2 < 1.0)) fail("need theta0 < r1 < r2 < 1");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) fail("modulation amplitude must lie in [0, 1)");
  if (!(ell > 0.0)) fail("ell must be positive");
  if (!(c_floor > 0.0)) fail("c_floor must be positive");
  if (profile == ReactionProfile::cubic_ignition && !(kappa >= 0.0)) fail("kappa must be >= 0");
  if (profile == ReactionProfile::smallness) {
    if (!(power > 2.0)) fail("smallness exponent p must exceed 2");
    if (!(c_omega >= 0.0)) fail("smallness constant must be >= 0");
  }
  if (vanishes()) return;

  // Sampled ignition properties on a fine T-grid at a few x positions.
  const int nt = 4000;
  for (int q = 0; q < 16; ++q) {
    const double x = ell * q / 16.0;
    for (int t = 0; t <= nt; ++t) {
      const double T = -0.5 + 2.0 * t / nt;
      const double f = evaluate(*this, x, 0.0, T);
      if (T <= theta0 && f != 0.0) fail("f must vanish below theta0");
      if (T > theta0 && T < 1.0 && !(f > 0.0)) fail("f must be positive on (theta0, 1)");
      if (T >= 1.0 && f > 0.0) fail("f must be non-positive above 1");
    }
  }
  std::vector<double> xs(16);
  for (int q = 0; q < 16; ++q) xs[q] = ell * q / 16.0;
  const double fl = sampled_floor(*this, xs);
  if (fl < c_floor) {
    std::ostringstream os;
    os << "f drops to " << fl << " on (r1, r2), below c_floor = " << c_floor;
    fail(os.str());
  }
}

double lipschitz_slope(const ReactionSpec& sp, const std::vector<double>& x_nodes, int samples) {
  double best = 0.0;
  for (double x : x_nodes)
    for (int t = 1; t < samples; ++t) {
      const double T = static_cast<double>(t) / samples;
      best = std::max(best, evaluate(sp, x, 0.0, T) / T);
    }
  return best;
}

double sampled_floor(const ReactionSpec& sp, const std::vector<double>& x_nodes, int samples) {
  double lo = std::numeric_limits<double>::infinity();
  for (double x : x_nodes)
    for (int t = 1; t < samples; ++t) {
      const double T = sp.r1 + (sp.r2 - sp.r1) * t / samples;
      lo = std::min(lo, evaluate(sp, x, 0.0, T));
    }
  return lo;
}

}  // namespace pulsefront
