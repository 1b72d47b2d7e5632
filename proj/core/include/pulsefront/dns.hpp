#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <vector>

#include "pulsefront/geometry.hpp"
#include "pulsefront/linsolve.hpp"
#include "pulsefront/plane.hpp"
#include "pulsefront/reaction.hpp"

namespace pulsefront {

struct DnsConfig {
  int n_periods = 16;
  int cols_per_period = 32;
  int n_z = 32;
  double dt = 0.005;
  int steps = 4000;
  /// Crank-Nicolson diffusion with Adams-Bashforth advection; otherwise the
  /// first-order monotone IMEX splitting.
  bool second_order = false;
  double front_x0 = 3.0;      ///< units of ell
  double init_width = 0.25;   ///< tanh width of the initial step
  double delta = 0.0;         ///< vorticity mollifier radius, 0 = off
  double buoyancy = 1.0;
  double cfl = 0.5;
  double speed_floor = 1e-8;
  int history_every = 10;
  /// Snapshots for the pulsating check are kept from this time on.
  double transient = 6.0;
  double snapshot_every = 0.05;
  /// Stop when the front comes within this many periods of the right end.
  double stop_margin = 3.0;

  void validate() const;
};

struct DnsHistoryRow {
  double t, x_f, max_T, max_u, min_T;
};

struct DnsSnapshot {
  double t;
  Eigen::VectorXd T;
};

struct DnsState {
  double t = 0.0;
  long step = 0;
  Eigen::VectorXd T, omega, psi;
  Eigen::VectorXd u1, u2;  ///< physical velocity
  Eigen::VectorXd U, W;    ///< contravariant components along xi and sigma
  Eigen::VectorXd nT_prev, nW_prev;  ///< explicit terms of the previous step (AB2)
  std::vector<DnsHistoryRow> history;
  std::vector<DnsSnapshot> snapshots;
  bool stopped = false;
  double min_T_seen = 0.0, max_T_seen = 1.0, max_u_seen = 0.0;
};

/// Stationary-frame simulation on a strip of n_periods cells with T = 1 at
/// x = 0, T = 0 at the right end, insulated walls, and omega = Psi = 0 on the
/// walls and ends. Matrices are factored once.
class Dns {
 public:
  Dns(const GeometryConfig& geometry, const ReactionSpec& spec, const DnsConfig& cfg);
  ~Dns();
  Dns(Dns&&) noexcept;

  const PlaneGrid& grid() const { return grid_; }
  const DnsConfig& config() const { return cfg_; }

  /// Smoothed step at front_x0 with zero flow.
  DnsState init() const;
  /// One step; throws ConfigError on a CFL violation and SolverError on NaN.
  void step(DnsState& s, double dt);
  /// Steps until cfg.steps or until the front nears the right end.
  void run(DnsState& s);

  /// Flow (Psi, U, W, u) from the current omega.
  void update_flow(DnsState& s) const;
  double divergence_norm(const DnsState& s) const;

 private:
  struct Impl;
  GeometryConfig geometry_;
  ReactionSpec spec_;
  DnsConfig cfg_;
  PlaneGrid grid_;
  std::unique_ptr<Impl> impl_;
};

/// x_f = sup{x : m(x) >= level} with linear interpolation, or nullopt when
/// no column reaches the level.
std::optional<double> front_position(const std::vector<double>& x, const std::vector<double>& means,
                                     double level);
std::optional<double> front_position(const PlaneGrid& g, const Eigen::VectorXd& T, double theta0);

struct SpeedFit {
  double c = 0.0;
  double r2 = 0.0;
  int samples = 0;
  bool warning = false;  ///< r2 < 0.95 or undefined
};

/// Least-squares slope of x_f against t over rows with t >= t_from. Throws
/// ConfigError with fewer than 20 samples.
SpeedFit measure_speed(const std::vector<DnsHistoryRow>& history, double t_from);

/// ||T(t1 + ell/c, x) - T(t1, x - ell)|| / ||T(t1)|| over columns in [x_lo, x_hi],
/// with linear interpolation between stored snapshots. Throws ConfigError when
/// the snapshots do not cover t1 and t1 + ell/c.
double pulsating_check(const PlaneGrid& g, const std::vector<DnsSnapshot>& snaps, double t1,
                       double c, double x_lo, double x_hi);

/// Speed fit after the transient and the pulsating mismatch at the first
/// stored snapshot, over [x_f(t1) + ell - half_window, x_f(t1) + ell + half_window].
struct DnsSummary {
  SpeedFit speed;
  std::optional<double> pulsating;  ///< unset when the snapshots are too short
  double t1 = 0.0, x_lo = 0.0, x_hi = 0.0;
};
DnsSummary summarize_dns(const Dns& dns, const DnsState& s, double theta0,
                         double half_window = 4.0);

}  // namespace pulsefront
