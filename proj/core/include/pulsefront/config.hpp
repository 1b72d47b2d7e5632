#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsefront/diagnostics.hpp"
#include "pulsefront/dns.hpp"
#include "pulsefront/frontsolve.hpp"
#include "pulsefront/geometry.hpp"
#include "pulsefront/reaction.hpp"

namespace pulsefront {

/// Fourier coefficients of one wall, kept so the run can be serialized.
struct WallSpec {
  double mean = 0.0;
  std::vector<double> cos_coeffs, sin_coeffs;
};

struct RunConfig {
  double ell = 1.0;
  double half_width = 2.0;
  double gravity_angle = 0.0;
  int n_s = 128, n_x = 16, n_z = 16;
  double a = 8.0;
  WallSpec bottom{0.0, {0.05}, {}};
  WallSpec top{1.0, {}, {0.1}};

  ReactionSpec reaction{};
  SolverConfig solver{};
  DnsConfig dns{};
  DiagnosticsConfig diagnostics{};

  std::uint64_t seed = 0;
  std::string output_dir = "out";

  GeometryConfig geometry() const;
  /// Sorted `section.key = value` lines with every value at full precision.
  std::string canonical() const;
  std::uint64_t hash() const;
  /// Validates every section; throws ConfigError.
  void validate() const;
};

/// INI file with sections geometry, reaction, solver, dns, diagnostics and
/// run. Unknown sections or keys and malformed values raise ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

}  // namespace pulsefront
