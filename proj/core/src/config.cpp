#include "pulsefront/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

long to_long(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const long v = to_long(key, text);
  if (v < -2147483647L || v > 2147483647L) throw ConfigError(key + ": integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

const char* walls_name(WallCondition w) {
  return w == WallCondition::dirichlet ? "dirichlet" : "conormal";
}

WallCondition walls_from(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "conormal") return WallCondition::conormal;
  if (t == "dirichlet") return WallCondition::dirichlet;
  throw ConfigError(key + ": expected conormal or dirichlet, got '" + text + "'");
}

struct Key {
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Table = std::map<std::string, std::map<std::string, Key>>;

#define PF_DOUBLE(expr)                                                                         \
  Key{[](RunConfig& c, const std::string& k, const std::string& v) { c.expr = to_double(k, v); }, \
      [](const RunConfig& c) { return fmt(c.expr); }}
#define PF_INT(expr)                                                                         \
  Key{[](RunConfig& c, const std::string& k, const std::string& v) { c.expr = to_int(k, v); }, \
      [](const RunConfig& c) { return std::to_string(c.expr); }}
#define PF_BOOL(expr)                                                                         \
  Key{[](RunConfig& c, const std::string& k, const std::string& v) { c.expr = to_bool(k, v); }, \
      [](const RunConfig& c) { return fmt_bool(c.expr); }}
#define PF_LIST(expr)                                                                         \
  Key{[](RunConfig& c, const std::string& k, const std::string& v) { c.expr = to_list(k, v); }, \
      [](const RunConfig& c) { return fmt_list(c.expr); }}

const Table& table() {
  static const Table t = [] {
    Table t;
    auto& g = t["geometry"];
    g["ell"] = PF_DOUBLE(ell);
    g["half_width"] = PF_DOUBLE(half_width);
    g["gravity_angle"] = PF_DOUBLE(gravity_angle);
    g["n_s"] = PF_INT(n_s);
    g["n_x"] = PF_INT(n_x);
    g["n_z"] = PF_INT(n_z);
    g["a"] = PF_DOUBLE(a);
    g["bottom_mean"] = PF_DOUBLE(bottom.mean);
    g["bottom_cos"] = PF_LIST(bottom.cos_coeffs);
    g["bottom_sin"] = PF_LIST(bottom.sin_coeffs);
    g["top_mean"] = PF_DOUBLE(top.mean);
    g["top_cos"] = PF_LIST(top.cos_coeffs);
    g["top_sin"] = PF_LIST(top.sin_coeffs);

    auto& r = t["reaction"];
    r["theta0"] = PF_DOUBLE(reaction.theta0);
    r["r1"] = PF_DOUBLE(reaction.r1);
    r["r2"] = PF_DOUBLE(reaction.r2);
    r["profile"] = Key{[](RunConfig& c, const std::string&, const std::string& v) {
                         c.reaction.profile = reaction_profile_from_string(trim(v));
                       },
                       [](const RunConfig& c) { return std::string(to_string(c.reaction.profile)); }};
    r["kappa"] = PF_DOUBLE(reaction.kappa);
    r["amplitude"] = PF_DOUBLE(reaction.amplitude);
    r["phase"] = PF_DOUBLE(reaction.phase);
    r["power"] = PF_DOUBLE(reaction.power);
    r["c_omega"] = PF_DOUBLE(reaction.c_omega);
    r["c_floor"] = PF_DOUBLE(reaction.c_floor);

    auto& s = t["solver"];
    s["eps"] = PF_DOUBLE(solver.eps);
    s["delta_factor"] = PF_DOUBLE(solver.delta_factor);
    s["buoyancy"] = PF_DOUBLE(solver.buoyancy);
    s["walls"] = Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                       c.solver.walls = walls_from(k, v);
                     },
                     [](const RunConfig& c) { return std::string(walls_name(c.solver.walls)); }};
    s["homotopy_steps"] = PF_INT(solver.homotopy_steps);
    s["relaxation"] = PF_DOUBLE(solver.relaxation);
    s["method"] = Key{[](RunConfig& c, const std::string&, const std::string& v) {
                        c.solver.method = iteration_method_from_string(trim(v));
                      },
                      [](const RunConfig& c) { return std::string(to_string(c.solver.method)); }};
    s["tol"] = PF_DOUBLE(solver.tol);
    s["homotopy_tol"] = PF_DOUBLE(solver.homotopy_tol);
    s["max_iter"] = PF_INT(solver.max_iter);
    s["eps_schedule"] = PF_LIST(solver.eps_schedule);
    s["delta_schedule"] = PF_LIST(solver.delta_schedule);
    s["a_schedule"] = PF_LIST(solver.a_schedule);
    s["warm_start"] = PF_BOOL(solver.warm_start);
    s["linear_method"] = Key{[](RunConfig& c, const std::string&, const std::string& v) {
                               c.solver.linear.method = solve_method_from_string(trim(v));
                             },
                             [](const RunConfig& c) {
                               return std::string(to_string(c.solver.linear.method));
                             }};
    s["linear_tol"] = PF_DOUBLE(solver.linear.tol);
    s["linear_max_iter"] = PF_INT(solver.linear.max_iter);
    s["verbosity"] = PF_INT(solver.verbosity);

    auto& d = t["dns"];
    d["n_periods"] = PF_INT(dns.n_periods);
    d["cols_per_period"] = PF_INT(dns.cols_per_period);
    d["n_z"] = PF_INT(dns.n_z);
    d["dt"] = PF_DOUBLE(dns.dt);
    d["steps"] = PF_INT(dns.steps);
    d["second_order"] = PF_BOOL(dns.second_order);
    d["front_x0"] = PF_DOUBLE(dns.front_x0);
    d["init_width"] = PF_DOUBLE(dns.init_width);
    d["delta"] = PF_DOUBLE(dns.delta);
    d["buoyancy"] = PF_DOUBLE(dns.buoyancy);
    d["cfl"] = PF_DOUBLE(dns.cfl);
    d["history_every"] = PF_INT(dns.history_every);
    d["transient"] = PF_DOUBLE(dns.transient);
    d["snapshot_every"] = PF_DOUBLE(dns.snapshot_every);
    d["stop_margin"] = PF_DOUBLE(dns.stop_margin);

    auto& q = t["diagnostics"];
    q["reaction_tol"] = PF_DOUBLE(diagnostics.reaction_tol);
    q["energy_tol"] = PF_DOUBLE(diagnostics.energy_tol);
    q["cross_section_tol"] = PF_DOUBLE(diagnostics.cross_section_tol);
    q["normalization_tol"] = PF_DOUBLE(diagnostics.normalization_tol);
    q["tail_tol"] = PF_DOUBLE(diagnostics.tail_tol);
    q["theta_one_tol"] = PF_DOUBLE(diagnostics.theta_one_tol);
    q["decay_r2"] = PF_DOUBLE(diagnostics.decay_r2);
    q["stability"] = PF_DOUBLE(diagnostics.stability);
    q["eigen_alpha"] = PF_DOUBLE(diagnostics.eigen_alpha);
    q["divergence_factor"] = PF_DOUBLE(diagnostics.divergence_factor);
    q["smallness_family"] = PF_BOOL(diagnostics.smallness_family);

    auto& u = t["run"];
    u["seed"] = Key{[](RunConfig& c, const std::string& k, const std::string& v) {
                      const long x = to_long(k, v);
                      if (x < 0) throw ConfigError(k + ": seed must be non-negative");
                      c.seed = static_cast<std::uint64_t>(x);
                    },
                    [](const RunConfig& c) { return std::to_string(c.seed); }};
    u["output"] = Key{[](RunConfig& c, const std::string&, const std::string& v) {
                        c.output_dir = trim(v);
                      },
                      [](const RunConfig& c) { return c.output_dir; }};
    return t;
  }();
  return t;
}

#undef PF_DOUBLE
#undef PF_INT
#undef PF_BOOL
#undef PF_LIST

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GeometryConfig RunConfig::geometry() const {
  GeometryConfig g;
  g.ell = ell;
  g.half_width = half_width;
  g.gravity_angle = gravity_angle;
  g.n_s = n_s;
  g.n_x = n_x;
  g.n_z = n_z;
  g.a = a;
  g.bottom = WallProfile::fourier(bottom.mean, bottom.cos_coeffs, bottom.sin_coeffs, ell);
  g.top = WallProfile::fourier(top.mean, top.cos_coeffs, top.sin_coeffs, ell);
  return g;
}

std::string RunConfig::canonical() const {
  std::string out;
  // The output directory does not change any artifact content.
  for (const auto& [section, keys] : table())
    for (const auto& [name, key] : keys)
      if (!(section == "run" && name == "output"))
        out += section + "." + name + " = " + key.get(*this) + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("geometry: " + m); };
  if (!(ell > 0.0)) fail("ell must be positive");
  if (!(a > 0.0)) fail("a must be positive");
  if (n_s < 8 || n_x < 4 || n_z < 4) fail("grid counts too small (n_s >= 8, n_x, n_z >= 4)");
  if (n_s % 2 != 0) fail("n_s must be even so s = 0 is a node");
  if (std::abs(reaction.ell - ell) > 1e-14 * ell)
    throw ConfigError("reaction: ell must match the geometry period");
  PeriodCell cell(geometry());
  if (!reaction.vanishes()) reaction.validate();
  solver.validate();
  dns.validate();
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  const Table& t = table();
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    const auto sec = t.find(section);
    if (sec == t.end()) {
      if (body.empty()) throw ConfigError("config: key '" + section + "' outside any section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [name, node] : body) {
      const auto key = sec->second.find(name);
      const std::string full = section + "." + name;
      if (key == sec->second.end()) throw ConfigError("config: unknown key " + full);
      if (!seen.insert(full).second) throw ConfigError("config: duplicate key " + full);
      key->second.set(cfg, full, node.data());
    }
  }
  cfg.reaction.ell = cfg.ell;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pulsefront
