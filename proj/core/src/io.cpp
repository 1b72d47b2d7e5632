#include "pulsefront/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON has no NaN or infinity; those become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
  if (!f) throw ConfigError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_field_csv(const std::string& path, const GridField& g) {
  const PeriodCell& c = g.cell();
  std::string out = "i,j,k,s,x,z,value\n";
  out.reserve(g.size() * 80);
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) {
        out += std::to_string(i) + ',' + std::to_string(j) + ',' + std::to_string(k) + ',' +
               g17(c.s_node(i)) + ',' + g17(c.x_node(j)) + ',' + g17(c.z_node(j, k)) + ',' +
               g17(g(i, j, k)) + '\n';
      }
  write_text(path, out);
}

GridField read_field_csv(const std::string& path, const CellPtr& cell, BcTag tag, double eps) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "i,j,k,s,x,z,value")
    throw SchemaError(path + ": bad header");
  GridField g(cell, tag, eps);
  const PeriodCell& c = *cell;
  for (int i = 0; i <= c.n_s(); ++i)
    for (int j = 0; j < c.n_x(); ++j)
      for (int k = 0; k <= c.n_z(); ++k) {
        if (!std::getline(in, line)) throw SchemaError(path + ": truncated");
        double v[7];
        const char* p = line.c_str();
        for (int q = 0; q < 7; ++q) {
          char* end = nullptr;
          v[q] = std::strtod(p, &end);
          if (end == p) throw SchemaError(path + ": malformed row '" + line + "'");
          p = end;
          if (q < 6) {
            if (*p != ',') throw SchemaError(path + ": malformed row '" + line + "'");
            ++p;
          }
        }
        if (*p != '\0') throw SchemaError(path + ": trailing data in row '" + line + "'");
        if (v[0] != i || v[1] != j || v[2] != k)
          throw SchemaError(path + ": node order mismatch at row '" + line + "'");
        const double tol = 1e-12 * (1.0 + c.a());
        if (std::abs(v[3] - c.s_node(i)) > tol || std::abs(v[4] - c.x_node(j)) > tol ||
            std::abs(v[5] - c.z_node(j, k)) > tol)
          throw SchemaError(path + ": coordinates do not match the configured geometry");
        if (!std::isfinite(v[6])) throw SchemaError(path + ": non-finite value");
        g(i, j, k) = v[6];
      }
  while (std::getline(in, line))
    if (!line.empty()) throw SchemaError(path + ": extra rows");
  return g;
}

void write_checkpoint(const std::string& dir, const FrontSolution& sol, const ArtifactMeta& meta) {
  fs::create_directories(dir);
  const PeriodCell& box = sol.cell();
  json h;
  h["schema"] = "pulsefront.checkpoint";
  h["schema_version"] = kSchemaVersion;
  h["config_hash"] = hash_hex(meta.config_hash);
  h["seed"] = meta.seed;
  h["c"] = sol.c;
  h["tau"] = sol.tau;
  h["eps"] = sol.eps;
  h["delta"] = sol.delta;
  h["a"] = sol.a;
  h["theta_minus"] = sol.theta_minus;
  h["theta_plus"] = sol.theta_plus;
  h["iterations"] = sol.iterations;
  h["converged"] = sol.converged;
  h["fixed_point_residual"] = num(sol.fixed_point_residual);
  h["box"] = {{"n_s", box.n_s()}, {"n_x", box.n_x()}, {"n_z", box.n_z()}, {"a", box.a()}};
  if (!sol.omega.empty())
    h["extended"] = {{"n_s", sol.omega.cell().n_s()}, {"a", sol.omega.cell().a()}};
  json hist = json::array();
  for (const auto& e : sol.history) hist.push_back({num(e.tau), num(e.dT), num(e.dc)});
  h["history"] = hist;
  json files = json::object();
  files["T"] = "T.csv";
  write_field_csv((fs::path(dir) / "T.csv").string(), sol.T);
  if (!sol.omega.empty()) {
    files["omega"] = "omega.csv";
    files["psi"] = "psi.csv";
    files["u1"] = "u1.csv";
    files["u2"] = "u2.csv";
    write_field_csv((fs::path(dir) / "omega.csv").string(), sol.omega);
    write_field_csv((fs::path(dir) / "psi.csv").string(), sol.psi);
    write_field_csv((fs::path(dir) / "u1.csv").string(), sol.u1);
    write_field_csv((fs::path(dir) / "u2.csv").string(), sol.u2);
  }
  h["fields"] = files;
  write_text((fs::path(dir) / "checkpoint.json").string(), h.dump(2) + "\n");
}

FrontSolution read_checkpoint(const std::string& dir, const GeometryConfig& geometry,
                              std::uint64_t expected_hash) {
  const std::string path = (fs::path(dir) / "checkpoint.json").string();
  json h;
  try {
    h = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  try {
    if (h.at("schema").get<std::string>() != "pulsefront.checkpoint")
      throw SchemaError(path + ": not a checkpoint");
    if (h.at("schema_version").get<int>() != kSchemaVersion)
      throw SchemaError(path + ": unsupported schema_version");
    if (expected_hash != 0 && h.at("config_hash").get<std::string>() != hash_hex(expected_hash))
      throw SchemaError(path + ": config hash " + h.at("config_hash").get<std::string>() +
                        " does not match " + hash_hex(expected_hash));
    const json& b = h.at("box");
    if (b.at("n_x").get<int>() != geometry.n_x || b.at("n_z").get<int>() != geometry.n_z)
      throw SchemaError(path + ": cross-section grid differs from the configuration");
    GeometryConfig g = geometry;
    g.n_s = b.at("n_s").get<int>();
    g.a = b.at("a").get<double>();
    const CellPtr box = build_period_cell(g);

    FrontSolution s;
    s.c = h.at("c").get<double>();
    s.tau = h.at("tau").get<double>();
    s.eps = h.at("eps").get<double>();
    s.delta = h.at("delta").get<double>();
    s.a = h.at("a").get<double>();
    s.theta_minus = h.at("theta_minus").get<double>();
    s.theta_plus = h.at("theta_plus").get<double>();
    s.iterations = h.at("iterations").get<int>();
    s.converged = h.at("converged").get<bool>();
    s.fixed_point_residual =
        h.at("fixed_point_residual").is_null() ? NAN : h.at("fixed_point_residual").get<double>();
    for (const auto& e : h.at("history"))
      s.history.push_back({e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()});

    const json& files = h.at("fields");
    auto file = [&](const char* name) { return (fs::path(dir) / files.at(name).get<std::string>()).string(); };
    s.T = read_field_csv(file("T"), box, BcTag::temperature, s.eps);
    if (h.contains("extended")) {
      const json& e = h.at("extended");
      const CellPtr ext = extended_cell(*box, e.at("a").get<double>() - box->a());
      if (ext->n_s() != e.at("n_s").get<int>()) throw SchemaError(path + ": extended grid mismatch");
      s.omega = read_field_csv(file("omega"), ext, BcTag::vorticity, s.eps);
      s.psi = read_field_csv(file("psi"), ext, BcTag::stream, s.eps);
      s.u1 = read_field_csv(file("u1"), box, BcTag::velocity_component, s.eps);
      s.u2 = read_field_csv(file("u2"), box, BcTag::velocity_component, s.eps);
    }
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string report_json(const DiagnosticsReport& r, const ArtifactMeta& meta) {
  json j;
  j["schema"] = "pulsefront.report";
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = hash_hex(meta.config_hash);
  j["seed"] = meta.seed;
  j["mode"] = meta.mode;
  j["c"] = num(r.c);
  j["eps"] = num(r.eps);
  j["delta"] = num(r.delta);
  j["a"] = num(r.a);
  j["reaction_rate_residual"] = num(r.reaction_rate_residual);
  j["energy_residual"] = num(r.energy_residual);
  j["burning_product"] = num(r.burning_product);
  j["c_bounds_ratio"] = num(r.speed_bound.ratio);
  j["speed_bound"] = {{"ratio", num(r.speed_bound.ratio)},
                      {"M", num(r.speed_bound.M)},
                      {"u_sup", num(r.speed_bound.u_sup)},
                      {"grad_log_psi", num(r.speed_bound.grad_log_psi)},
                      {"mu", num(r.speed_bound.mu)},
                      {"min_psi", num(r.speed_bound.min_psi)}};
  j["vorticity_bound_ratio"] = num(r.vorticity_bound_ratio);
  j["theta_minus"] = num(r.theta_minus);
  j["theta_plus"] = num(r.theta_plus);
  j["decay_slope"] = num(r.decay.slope);
  j["decay_r2"] = num(r.decay.r2);
  j["decay"] = {{"slope", num(r.decay.slope)},  {"r2", num(r.decay.r2)},
                {"R", num(r.decay.R)},          {"R_end", num(r.decay.R_end)},
                {"u_window", num(r.decay.u_window)}, {"samples", r.decay.samples}};
  j["c2_over_eps"] = vec(r.c2_over_eps);
  j["I_profile"] = {{"s", vec(r.cross_section.s)},
                    {"I", vec(r.cross_section.I)},
                    {"I_ss", vec(r.cross_section.I_ss)},
                    {"G", vec(r.cross_section.G)},
                    {"residual", num(r.cross_section.residual)},
                    {"slope_left", num(r.cross_section.slope_left)},
                    {"slope_right", num(r.cross_section.slope_right)},
                    {"monotone", r.cross_section.monotone}};
  j["normalization_error"] = num(r.normalization_error);
  j["divergence_norm"] = num(r.divergence_norm);
  j["pulsating_mismatch"] = r.pulsating_mismatch ? num(*r.pulsating_mismatch) : json(nullptr);
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"name", e.name},
                       {"value", num(e.value)},
                       {"threshold", num(e.threshold)},
                       {"verdict", to_string(e.verdict)},
                       {"note", e.note}});
  j["entries"] = entries;
  j["failed"] = r.any_failed();
  return j.dump(2) + "\n";
}

std::string report_markdown(const DiagnosticsReport& r, const ArtifactMeta& meta) {
  std::ostringstream os;
  os << "# Diagnostics report\n\n";
  os << "mode `" << meta.mode << "`, config hash `" << hash_hex(meta.config_hash)
     << "`, schema version " << kSchemaVersion << "\n\n";
  os << "c = " << g17(r.c) << ", eps = " << g17(r.eps) << ", delta = " << g17(r.delta)
     << ", a = " << g17(r.a) << "\n\n";
  os << "| entry | value | threshold | verdict | note |\n|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& e : r.entries) {
    std::snprintf(buf, sizeof buf, "%.6g", e.value);
    std::string v = buf;
    std::snprintf(buf, sizeof buf, "%.6g", e.threshold);
    os << "| " << e.name << " | " << v << " | " << buf << " | " << to_string(e.verdict) << " | "
       << e.note << " |\n";
  }
  os << "\n" << (r.any_failed() ? "At least one check failed." : "No check failed.") << "\n";
  return os.str();
}

void write_report(const std::string& dir, const DiagnosticsReport& r, const ArtifactMeta& meta) {
  write_text((fs::path(dir) / "report.json").string(), report_json(r, meta));
  write_text((fs::path(dir) / "report.md").string(), report_markdown(r, meta));
}

void write_dns_history(const std::string& path, const std::vector<DnsHistoryRow>& rows) {
  std::string out = "t,x_f,max_T,max_u,min_T\n";
  for (const auto& r : rows)
    out += g17(r.t) + ',' + g17(r.x_f) + ',' + g17(r.max_T) + ',' + g17(r.max_u) + ',' +
           g17(r.min_T) + '\n';
  write_text(path, out);
}

void write_dns_snapshots(const std::string& path, const PlaneGrid& grid,
                         const std::vector<DnsSnapshot>& snaps, double stride) {
  std::string out = "t,x,mean\n";
  double next = -1e300;
  for (const auto& s : snaps) {
    if (s.t + 1e-12 < next) continue;
    next = s.t + stride;
    const auto m = grid.column_means(s.T);
    for (int j = 0; j < grid.cols(); ++j)
      out += g17(s.t) + ',' + g17(grid.x(j)) + ',' + g17(m[static_cast<std::size_t>(j)]) + '\n';
  }
  write_text(path, out);
}

void write_continuation_table(const std::string& path, const ContinuationResult& res) {
  std::string out = "parameter,value,ok,c,theta_minus,iterations,error\n";
  for (const auto& st : res.stages) {
    std::string err = st.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    out += st.parameter + ',' + g17(st.value) + ',' + (st.ok ? "1" : "0") + ',' + g17(st.c) +
           ',' + g17(st.theta_minus) + ',' + std::to_string(st.iterations) + ',' + err + '\n';
  }
  write_text(path, out);
}

std::string error_json(const std::string& kind, const std::string& message, int exit_code) {
  json j;
  j["schema"] = "pulsefront.error";
  j["schema_version"] = kSchemaVersion;
  j["error"] = {{"kind", kind}, {"message", message}};
  j["exit_code"] = exit_code;
  return j.dump(2) + "\n";
}

}  // namespace pulsefront
