// pulsefront <mode> --config <path> [--out <dir>]
//   exit 0 success, 2 config or artifact error, 3 solver failure,
//   4 a diagnostics threshold was breached, 1 anything unexpected.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "pulsefront/config.hpp"
#include "pulsefront/diagnostics.hpp"
#include "pulsefront/dns.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/frontsolve.hpp"
#include "pulsefront/io.hpp"
#include "pulsefront/mms.hpp"

namespace fs = std::filesystem;
using namespace pulsefront;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kConfig = 2, kSolver = 3, kDiagnostics = 4, kInternal = 1;

struct Run {
  RunConfig cfg;
  std::string out;
  ArtifactMeta meta;
};

void log(const std::string& msg) { std::cerr << "[pulsefront] " << msg << "\n"; }

std::string path(const Run& r, const std::string& name) { return (fs::path(r.out) / name).string(); }

void write_config_copy(const Run& r) {
  write_text(path(r, "config.resolved.ini"),
             "; config hash " + hash_hex(r.meta.config_hash) + "\n" + r.cfg.canonical());
}

int verdict_code(const DiagnosticsReport& rep) { return rep.any_failed() ? kDiagnostics : kOk; }

int mode_solve(const Run& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const CellPtr cell = build_period_cell(r.cfg.geometry());
  const FrontSolution sol = fixed_point_solve(r.cfg.solver, r.cfg.reaction, cell);
  log("solve: c = " + std::to_string(sol.c) + " after " + std::to_string(sol.iterations) +
      " iterations, " +
      std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
      " s");
  write_checkpoint(path(r, "checkpoint"), sol, r.meta);
  const DiagnosticsReport rep = diagnose(sol, r.cfg.reaction, r.cfg.diagnostics);
  write_report(r.out, rep, r.meta);
  return verdict_code(rep);
}

int mode_report(const Run& r, const std::string& checkpoint) {
  const std::string dir = checkpoint.empty() ? path(r, "checkpoint") : checkpoint;
  const FrontSolution sol = read_checkpoint(dir, r.cfg.geometry(), r.meta.config_hash);
  const DiagnosticsReport rep = diagnose(sol, r.cfg.reaction, r.cfg.diagnostics);
  write_report(r.out, rep, r.meta);
  return verdict_code(rep);
}

int mode_continuation(const Run& r) {
  const ContinuationResult res = continuation_run(
      r.cfg.solver, r.cfg.reaction, r.cfg.geometry(), [](const ContinuationStage& st) {
        log("stage " + st.parameter + " = " + std::to_string(st.value) +
            (st.ok ? ": c = " + std::to_string(st.c) : ": failed, " + st.error));
      });
  write_continuation_table(path(r, "continuation.csv"), res);

  const ContinuationStage* last_eps = nullptr;
  for (const auto& st : res.stages)
    if (st.parameter == "eps" && st.ok) last_eps = &st;

  json j;
  j["schema"] = "pulsefront.continuation";
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = hash_hex(r.meta.config_hash);
  j["seed"] = r.meta.seed;
  j["c_extrapolated"] = res.c_extrapolated;
  j["speed_positive"] = res.speed_positive;
  json stages = json::array();
  for (const auto& st : res.stages)
    stages.push_back({{"parameter", st.parameter},
                      {"value", st.value},
                      {"ok", st.ok},
                      {"c", st.c},
                      {"theta_minus", st.theta_minus},
                      {"iterations", st.iterations},
                      {"error", st.error}});
  j["stages"] = stages;
  write_text(path(r, "continuation.json"), j.dump(2) + "\n");

  if (!last_eps) throw SolverError("continuation: no eps stage converged");
  write_checkpoint(path(r, "checkpoint"), last_eps->solution, r.meta);
  const DiagnosticsReport rep =
      diagnose(last_eps->solution, r.cfg.reaction, r.cfg.diagnostics, &res);
  write_report(r.out, rep, r.meta);
  if (!res.speed_positive) return kDiagnostics;
  return verdict_code(rep);
}

int mode_dns(const Run& r) {
  Dns dns(r.cfg.geometry(), r.cfg.reaction, r.cfg.dns);
  DnsState s = dns.init();
  const auto t0 = std::chrono::steady_clock::now();
  dns.run(s);
  log("dns: " + std::to_string(s.step) + " steps to t = " + std::to_string(s.t) + " in " +
      std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
      " s");
  write_dns_history(path(r, "dns_history.csv"), s.history);
  write_dns_snapshots(path(r, "dns_snapshots.csv"), dns.grid(), s.snapshots, 0.5);
  const DnsSummary sum = summarize_dns(dns, s, r.cfg.reaction.theta0);

  const bool in_range = s.min_T_seen >= -1e-8 && s.max_T_seen <= 1.0 + 1e-8;
  json j;
  j["schema"] = "pulsefront.dns";
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = hash_hex(r.meta.config_hash);
  j["seed"] = r.meta.seed;
  j["steps"] = s.step;
  j["t"] = s.t;
  j["stopped_near_end"] = s.stopped;
  j["c"] = sum.speed.c;
  j["r2"] = sum.speed.r2;
  j["samples"] = sum.speed.samples;
  j["speed_warning"] = sum.speed.warning;
  j["pulsating_mismatch"] = sum.pulsating ? json(*sum.pulsating) : json(nullptr);
  j["pulsating_window"] = {{"t1", sum.t1}, {"x_lo", sum.x_lo}, {"x_hi", sum.x_hi}};
  j["min_T"] = s.min_T_seen;
  j["max_T"] = s.max_T_seen;
  j["max_u"] = s.max_u_seen;
  j["divergence_norm"] = dns.divergence_norm(s);
  j["maximum_principle"] = in_range;
  write_text(path(r, "dns.json"), j.dump(2) + "\n");
  log("dns: c = " + std::to_string(sum.speed.c) + ", r2 = " + std::to_string(sum.speed.r2));
  if (sum.pulsating && *sum.pulsating > 0.05) return kDiagnostics;
  if (!r.cfg.dns.second_order && !in_range) return kDiagnostics;
  return kOk;
}

int mode_verify(const Run& r) {
  MmsOptions o;
  o.linear = r.cfg.solver.linear;
  std::string csv = "row,wavy,n_s,n_x,n_z,h,error,order\n";
  json rows = json::array();
  bool ok = true;
  for (MmsRow row : {MmsRow::L_epsilon, MmsRow::omega, MmsRow::psi, MmsRow::temperature})
    for (bool wavy : {false, true}) {
      const MmsResult res = run_mms(row, wavy, o);
      for (std::size_t l = 0; l < res.levels.size(); ++l) {
        const auto& lv = res.levels[l];
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%.17g,%.17g,%s\n", to_string(row),
                      wavy ? 1 : 0, lv.n_s, lv.n_x, lv.n_z, lv.h, lv.error,
                      l == 0 ? "" : std::to_string(res.orders[l - 1]).c_str());
        csv += buf;
      }
      for (double q : res.orders) ok = ok && q >= 1.8 && q <= 2.2;
      rows.push_back({{"row", to_string(row)}, {"wavy", wavy}, {"orders", res.orders}});
      log(std::string("verify: ") + to_string(row) + (wavy ? " wavy" : " flat") + " orders " +
          rows.back()["orders"].dump());
    }
  write_text(path(r, "mms.csv"), csv);
  json j;
  j["schema"] = "pulsefront.mms";
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = hash_hex(r.meta.config_hash);
  j["order_window"] = {1.8, 2.2};
  j["rows"] = rows;
  j["pass"] = ok;
  write_text(path(r, "mms.json"), j.dump(2) + "\n");
  return ok ? kOk : kDiagnostics;
}

int fail(const std::string& out, const std::string& kind, const std::string& msg, int code) {
  const std::string body = error_json(kind, msg, code);
  std::cerr << body;
  if (!out.empty()) {
    try {
      write_text((fs::path(out) / "error.json").string(), body);
    } catch (...) {
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsating reactive Boussinesq fronts in a periodic strip"};
  app.require_subcommand(1);
  std::string config_path, out_dir, checkpoint;
  for (const char* name : {"solve", "dns", "continuation", "verify", "report"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides run.output)");
    if (std::string(name) == "report")
      sub->add_option("--checkpoint", checkpoint, "checkpoint directory (default <out>/checkpoint)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return fail("", "usage_error", e.what(), kConfig);
  }
  const std::string mode = app.get_subcommands().front()->get_name();

  Run r;
  try {
    r.cfg = load_config(config_path);
    r.out = out_dir.empty() ? r.cfg.output_dir : out_dir;
    r.meta = {r.cfg.hash(), r.cfg.seed, mode};
    fs::create_directories(r.out);
    write_config_copy(r);
    log(mode + ": config hash " + hash_hex(r.meta.config_hash) + ", output " + r.out);
    if (mode == "solve") return mode_solve(r);
    if (mode == "report") return mode_report(r, checkpoint);
    if (mode == "continuation") return mode_continuation(r);
    if (mode == "dns") return mode_dns(r);
    return mode_verify(r);
  } catch (const ConfigError& e) {
    return fail(r.out, e.kind(), e.what(), kConfig);
  } catch (const SchemaError& e) {
    return fail(r.out, e.kind(), e.what(), kConfig);
  } catch (const SolverError& e) {
    return fail(r.out, e.kind(), e.what(), kSolver);
  } catch (const std::exception& e) {
    return fail(r.out, "internal_error", e.what(), kInternal);
  }
}
