#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "pulsefront/config.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/io.hpp"

using namespace pulsefront;
using namespace pulsefront::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pulsefront_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const FrontSolution& small_front() {
  static const FrontSolution s = [] {
    auto cell = build_period_cell(wavy_geometry(64, 8, 8, 8.0));
    return fixed_point_solve(SolverConfig{}, ReactionSpec{}, cell);
  }();
  return s;
}

}  // namespace

TEST_SUITE("config_io") {
  TEST_CASE("FNV-1a reference vectors") {
    CHECK(hash_hex(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hash_hex(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(hash_hex(fnv1a64("foobar")) == "85944171f73967e8");
  }

  TEST_CASE("parsing") {
    const RunConfig c = parse_config(
        "[geometry]\nn_s = 64\nbottom_cos = 0.05, 0.01\n[solver]\neps = 0.04\n"
        "eps_schedule = 0.08, 0.04\n[run]\nseed = 7\n");
    CHECK(c.n_s == 64);
    CHECK(c.bottom.cos_coeffs == std::vector<double>{0.05, 0.01});
    CHECK(c.solver.eps == 0.04);
    CHECK(c.seed == 7);
    CHECK(c.n_x == 16);  // default kept
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(parse_config("[geometry]\nnope = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[geometry]\nn_s = 64\nn_s = 32\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[geometry]\nn_s = 6.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[geometry]\nn_s = 63\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\neps = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nwalls = sideways\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[dns]\nsecond_order = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[reaction]\ntheta0 = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
  }

  TEST_CASE("hash depends on values, not formatting") {
    const RunConfig a = parse_config("[geometry]\na = 8\n[run]\noutput = x\n");
    const RunConfig b = parse_config("; comment\n[geometry]\n  a=8.000\n[run]\noutput = y\n");
    const RunConfig c = parse_config("[geometry]\na = 8.5\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(parse_config("").hash() == RunConfig{}.hash());
  }

  TEST_CASE("field CSV round trip is exact") {
    const fs::path dir = scratch("csv");
    const FrontSolution& s = small_front();
    write_field_csv((dir / "T.csv").string(), s.T);
    const GridField back = read_field_csv((dir / "T.csv").string(), s.T.cell_ptr(), BcTag::temperature, s.eps);
    CHECK((back.values() - s.T.values()).cwiseAbs().maxCoeff() == 0.0);

    SUBCASE("a different grid is rejected") {
      auto other = build_period_cell(wavy_geometry(64, 4, 8, 8.0));
      CHECK_THROWS_AS(read_field_csv((dir / "T.csv").string(), other, BcTag::temperature, 0.0),
                      SchemaError);
    }
  }

  TEST_CASE("checkpoint round trip") {
    const fs::path dir = scratch("ckpt");
    const FrontSolution& s = small_front();
    const ArtifactMeta meta{0x1234abcdULL, 3, "solve"};
    write_checkpoint(dir.string(), s, meta);
    const FrontSolution r = read_checkpoint(dir.string(), wavy_geometry(64, 8, 8, 8.0), 0x1234abcdULL);
    CHECK(r.c == s.c);
    CHECK(r.eps == s.eps);
    CHECK(r.delta == s.delta);
    CHECK(r.theta_minus == s.theta_minus);
    CHECK(r.iterations == s.iterations);
    CHECK(r.converged == s.converged);
    CHECK((r.T.values() - s.T.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.omega.values() - s.omega.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.psi.values() - s.psi.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.u1.values() - s.u1.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.u2.values() - s.u2.values()).cwiseAbs().maxCoeff() == 0.0);

    const std::string json_a = report_json(diagnose(s, ReactionSpec{}), meta);
    const std::string json_b = report_json(diagnose(r, ReactionSpec{}), meta);
    CHECK(json_a == json_b);

    CHECK_THROWS_AS(read_checkpoint(dir.string(), wavy_geometry(64, 8, 8, 8.0), 0x99ULL), SchemaError);

    SUBCASE("truncated field") {
      const std::string text = read_text((dir / "psi.csv").string());
      write_text((dir / "psi.csv").string(), text.substr(0, text.size() / 2));
      CHECK_THROWS_AS(read_checkpoint(dir.string(), wavy_geometry(64, 8, 8, 8.0)), SchemaError);
    }
    SUBCASE("broken json") {
      write_text((dir / "checkpoint.json").string(), "{\"schema\": ");
      CHECK_THROWS_AS(read_checkpoint(dir.string(), wavy_geometry(64, 8, 8, 8.0)), SchemaError);
    }
    SUBCASE("missing directory") {
      CHECK_THROWS_AS(read_checkpoint((dir / "absent").string(), wavy_geometry(64, 8, 8, 8.0)),
                      SchemaError);
    }
  }

  TEST_CASE("report and error documents") {
    const FrontSolution& s = small_front();
    const ArtifactMeta meta{42, 1, "solve"};
    const auto j = nlohmann::json::parse(report_json(diagnose(s, ReactionSpec{}), meta));
    CHECK(j.at("schema") == "pulsefront.report");
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("config_hash") == "000000000000002a");
    CHECK(j.at("c").get<double>() == s.c);
    CHECK(j.at("entries").is_array());
    const auto e = nlohmann::json::parse(error_json("config_error", "bad \"key\"", 2));
    CHECK(e.at("error").at("kind") == "config_error");
    CHECK(e.at("error").at("message") == "bad \"key\"");
    CHECK(e.at("exit_code") == 2);
  }
}
