#pragma once

#include <string>
#include <vector>

namespace pulsefront {

enum class ReactionProfile { cubic_ignition, smallness };

const char* to_string(ReactionProfile p);
ReactionProfile reaction_profile_from_string(const std::string& name);

/// Ignition nonlinearity f(x, z, T).
///   cubic_ignition: rho(x) kappa (T - theta0)_+^3 (1 - T)
///   smallness:      C (T - theta0)_+^p (1 - T)_+
/// with rho(x) = 1 + A sin(2 pi x / ell + phase).
struct ReactionSpec {
  double theta0 = 0.25;
  double r1 = 0.45;
  double r2 = 0.9;
  ReactionProfile profile = ReactionProfile::cubic_ignition;
  double kappa = 10.0;
  double amplitude = 0.5;
  double phase = 0.0;
  double ell = 1.0;
  double power = 3.0;
  double c_omega = 1.0;
  double c_floor = 1e-6;

  /// Throws ConfigError when the parameter ranges or the sampled ignition
  /// properties fail (f = 0 below theta0, f > 0 on (theta0, 1), f <= 0 above
  /// 1, f >= c_floor on (r1, r2)).
  void validate() const;

  bool vanishes() const;
  double modulation(double x) const;
};

double evaluate(const ReactionSpec& spec, double x, double z, double T);

/// df/dT.
double evaluate_dT(const ReactionSpec& spec, double x, double z, double T);

/// sup over T in (0, 1) and the given x nodes of f(x, T) / T, by sampling
/// `samples` points.
double lipschitz_slope(const ReactionSpec& spec, const std::vector<double>& x_nodes,
                       int samples = 100000);

/// Smallest sampled value of f on (r1, r2) over the given x nodes.
double sampled_floor(const ReactionSpec& spec, const std::vector<double>& x_nodes,
                     int samples = 2000);

}  // namespace pulsefront
