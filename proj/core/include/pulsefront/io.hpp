#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsefront/config.hpp"
#include "pulsefront/diagnostics.hpp"
#include "pulsefront/dns.hpp"
#include "pulsefront/frontsolve.hpp"

namespace pulsefront {

inline constexpr int kSchemaVersion = 1;

/// Provenance stamped into every artifact.
struct ArtifactMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string mode;
};

/// Columns i,j,k,s,x,z,value with %.17g values, so reading back is exact.
void write_field_csv(const std::string& path, const GridField& g);
/// Reads values into a field of the given shape; throws SchemaError on any
/// mismatch in shape, node order or coordinates.
GridField read_field_csv(const std::string& path, const CellPtr& cell, BcTag tag, double eps);

/// checkpoint.json plus T.csv, omega.csv, psi.csv, u1.csv, u2.csv in dir.
void write_checkpoint(const std::string& dir, const FrontSolution& sol, const ArtifactMeta& meta);

/// Rebuilds the solution on the cross-section of `geometry`. The stored
/// config hash must equal expected_hash unless the latter is 0.
FrontSolution read_checkpoint(const std::string& dir, const GeometryConfig& geometry,
                              std::uint64_t expected_hash = 0);

/// report.json (schema-versioned) and report.md.
std::string report_json(const DiagnosticsReport& r, const ArtifactMeta& meta);
std::string report_markdown(const DiagnosticsReport& r, const ArtifactMeta& meta);
void write_report(const std::string& dir, const DiagnosticsReport& r, const ArtifactMeta& meta);

/// t,x_f,max_T,max_u,min_T.
void write_dns_history(const std::string& path, const std::vector<DnsHistoryRow>& rows);
/// Column means m(x) of each snapshot: t,x,mean.
void write_dns_snapshots(const std::string& path, const PlaneGrid& grid,
                         const std::vector<DnsSnapshot>& snaps, double stride);

/// parameter,value,ok,c,theta_minus,iterations,error.
void write_continuation_table(const std::string& path, const ContinuationResult& res);

/// {"schema": ..., "error": {"kind": ..., "message": ...}, "exit_code": n}.
std::string error_json(const std::string& kind, const std::string& message, int exit_code);

/// Writes text to path, creating parent directories.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace pulsefront
