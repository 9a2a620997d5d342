#include <doctest.h>

#include <fstream>

#include "ellinc/run_config.hpp"

using namespace ellinc;

namespace {

const std::filesystem::path kData = ELLINC_TEST_DATA;
const std::filesystem::path kConfigs = ELLINC_CONFIG_DIR;

std::string minimal(const std::string& relation, const std::string& extra = "") {
  return R"({"schema_version": 1, "problem": {"kind": "homogeneous",
    "operator": {"family": "grad1d", "shape": [3], "boundary": "zero"},
    "relation": )" + relation + R"(, "f": [1, 1, 1]})" + extra + "}";
}

ErrorRecord error_of(const RunReport& r) {
  REQUIRE(r.error.has_value());
  return *r.error;
}

}  // namespace

TEST_CASE("Poisson config") {
  const RunReport r = run_config(kConfigs / "poisson1d.json");
  CHECK(r.status == "ok");
  CHECK(exit_code(r) == 0);
  REQUIRE(r.solution);
  CHECK(r.solution->u.size() == 3);
  CHECK(r.solution->u[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r.solution->u[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.solution->u[2] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r.checks.size() == 4);
  for (const CheckResult& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
}

TEST_CASE("Neumann config with a kernel right-hand side is rejected") {
  const RunReport r = run_config(kConfigs / "neumann_incompatible.json");
  CHECK(r.status == "error");
  CHECK(exit_code(r) != 0);
  CHECK(error_of(r).code == "rhs_not_in_H_minus_1");
  CHECK_FALSE(r.solution.has_value());
}

TEST_CASE("oracle check on a sign relation") {
  const RunReport r = run_config(kConfigs / "sign_oracle.json", RunMode::OracleCheck);
  CHECK(r.status == "ok");
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].name == "oracle");
  CHECK(r.checks[0].values.at("oracle_delta") <= 1e-8);
}

TEST_CASE("every shipped config passes verification") {
  for (const char* name : {"poisson1d.json", "sign_oracle.json", "dirichlet_ramp_sign.json",
                           "neumann_flux.json", "elasticity_power.json"}) {
    const RunReport r = run_config(kConfigs / name, RunMode::Verify);
    CHECK_MESSAGE(r.status == "ok", name);
    REQUIRE(!r.checks.empty());
    CHECK(r.checks.front().name == "certificate");
  }
}

TEST_CASE("custom operator and file-referenced vectors") {
  const RunReport r = run_config(kData / "custom_vector_file.json");
  CHECK(r.status == "ok");
  REQUIRE(r.checks.size() == 3);
  CHECK(r.checks[1].values.count("linear_direct_delta") == 1);
}

TEST_CASE("schema errors carry field and line") {
  const ErrorRecord field = error_of(run_config(kData / "bad_field.json"));
  CHECK(field.code == "config_error");
  CHECK(field.field == "problem.relation.c");
  CHECK(field.line == 8);

  const ErrorRecord syntax = error_of(run_config(kData / "bad_syntax.json"));
  CHECK(syntax.code == "config_syntax");
  CHECK(syntax.line == 4);

  const ErrorRecord missing = error_of(run_config(kData / "does_not_exist.json"));
  CHECK(missing.code == "io_error");

  auto parse_error = [](const std::string& text) {
    try {
      (void)parse_run_config(text, kData);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(parse_error(minimal(R"({"type": "identity"})")) == "<none>");
  CHECK(parse_error(minimal(R"({"type": "magic"})")) == "problem.relation.type");
  CHECK(parse_error(minimal(R"({"type": "identity", "extra": 1})")) == "problem.relation.extra");
  CHECK(parse_error(minimal(R"({"type": "diagonal", "c": 1, "graphs": [{"type": "sign"}]})")) ==
        "problem.relation.graphs");
  CHECK(parse_error(minimal(R"({"type": "diagonal", "c": 1, "graph": {"type": "power", "p": 0.5}})")) ==
        "problem.relation.graph");
  CHECK(parse_error(minimal(R"({"type": "linear", "matrix": [[1, 0], [0, 1]]})")) ==
        "problem.relation.matrix");
  CHECK(parse_error(minimal(R"({"type": "identity"})", R"(, "checks": ["everything"])")) == "checks[0]");
  CHECK(parse_error(minimal(R"({"type": "identity"})", R"(, "solver": {"tol": -1})")) == "solver.tol");
  CHECK(parse_error(R"({"schema_version": 2, "problem": {}})") == "schema_version");
}

TEST_CASE("overrides are applied and echoed") {
  const RunConfig cfg = load_run_config(kConfigs / "poisson1d.json", RunOverrides{1e-8, 99});
  CHECK(cfg.problem.options.tol == 1e-8);
  CHECK(cfg.seed == 99);
  CHECK(cfg.document["solver"]["tol"] == 1e-8);
  CHECK(cfg.document["solver"]["seed"] == 99);
}

TEST_CASE("unsupported checks fail without aborting the run") {
  const std::string text = R"({"schema_version": 1, "problem": {"kind": "homogeneous",
    "operator": {"family": "grad1d", "shape": [3], "boundary": "zero"},
    "relation": {"type": "identity"}, "f": [1, 1, 1]},
    "checks": ["dirichlet_estimate", "certificate"]})";
  const RunReport r = execute(parse_run_config(text, kData), RunMode::Solve);
  CHECK(r.status == "failed");
  CHECK(exit_code(r) == 1);
  REQUIRE(r.checks.size() == 2);
  CHECK_FALSE(r.checks[0].pass);
  CHECK(r.checks[0].error.find("capability_error") == 0);
  CHECK(r.checks[1].pass);
}

TEST_CASE("report serialization") {
  const RunReport r = run_config(kConfigs / "dirichlet_ramp_sign.json", RunMode::Verify);
  const std::string text = emit_report(r, ReportFormat::Json);
  CHECK(report_from_json(nlohmann::json::parse(text)) == r);

  const RunReport err = run_config(kConfigs / "neumann_incompatible.json");
  CHECK(report_from_json(nlohmann::json::parse(emit_report(err, ReportFormat::Json))) == err);

  // No checks: an empty array, never null.
  const RunReport plain = execute(parse_run_config(minimal(R"({"type": "identity"})"), kData), RunMode::Solve);
  const auto doc = nlohmann::json::parse(emit_report(plain, ReportFormat::Json));
  CHECK(doc.at("checks").is_array());
  CHECK(doc.at("checks").empty());

  // Keys come out sorted.
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  CHECK(std::is_sorted(keys.begin(), keys.end()));

  CHECK(canonical_json(r).find("timing_ms") == std::string::npos);
  RunReport later = r;
  later.timing_ms += 5.0;
  CHECK(canonical_json(later) == canonical_json(r));

  const std::string summary = emit_report(r, ReportFormat::Text);
  CHECK(summary.find("status: ok") != std::string::npos);
  CHECK(summary.find("check oracle: pass") != std::string::npos);

  CHECK_THROWS_AS(report_from_json(nlohmann::json::object()), InputError);
}

TEST_CASE("same config and seed give identical reports") {
  const RunReport a = run_config(kConfigs / "poisson1d.json");
  const RunReport b = run_config(kConfigs / "poisson1d.json");
  CHECK(canonical_json(a) == canonical_json(b));
}
