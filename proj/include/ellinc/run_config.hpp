#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellinc/errors.hpp"
#include "ellinc/report.hpp"
#include "ellinc/solver.hpp"

namespace ellinc {

enum class CheckKind { Certificate, Oracle, Lipschitz, DirichletEstimate, NeumannEstimate, Monotonicity };

const char* to_string(CheckKind kind) noexcept;

/// A config that does not match the schema. `field` is the dotted path of
/// the offending value and `line` its best-effort location in the file.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& message, std::string field, int line,
              std::string code = "config_error")
      : InputError(message, std::move(code)), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct RunOverrides {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  nlohmann::json document;  // as parsed, with overrides applied
  Problem problem;
  /// Second problem for the continuity estimates (same operator and
  /// relation, data from `problem.compare`).
  std::optional<Problem> compare;
  std::vector<CheckKind> checks;
  std::uint64_t seed = 0;
  std::size_t lipschitz_pairs = 20;
  std::size_t monotonicity_trials = 200;
};

/// Parses config text; relative file references resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const RunOverrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const RunOverrides& overrides = {});

enum class RunMode { Solve, Verify, OracleCheck };

const char* to_string(RunMode mode) noexcept;

/// Solves the configured problem and runs the checks selected by `mode`:
/// Solve runs the configured checks, Verify adds the certificate check,
/// OracleCheck runs only the oracle comparison. Library errors end up in
/// the report, never as exceptions.
RunReport execute(const RunConfig& config, RunMode mode);

/// load_run_config + execute; load failures become error reports.
RunReport run_config(const std::filesystem::path& path, RunMode mode = RunMode::Solve,
                     const RunOverrides& overrides = {});

}  // namespace ellinc
