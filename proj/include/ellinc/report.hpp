#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ellinc {

inline constexpr int kSchemaVersion = 1;

enum class ReportFormat { Json, Text };

struct CheckResult {
  std::string name;
  bool pass = false;
  /// Check-specific numbers (deltas, ratios, estimate sides).
  std::map<std::string, double> values;
  /// Set when the check could not run.
  std::string error;

  bool operator==(const CheckResult&) const = default;
};

struct SolutionRecord {
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> certificate_x;
  std::vector<double> certificate_y;
  double certificate_residual = 0.0;
  std::size_t iterations = 0;
  std::map<std::string, double> diagnostics;

  bool operator==(const SolutionRecord&) const = default;
};

struct ErrorRecord {
  std::string code;
  std::string kind;
  std::string message;
  std::string field;  // dotted config path, empty if not config related
  int line = 0;       // 1-based config line, 0 if unknown

  bool operator==(const ErrorRecord&) const = default;
};

/// Everything a run produces. `timing_ms` is the only field that varies
/// between runs of the same config and seed.
struct RunReport {
  int schema_version = kSchemaVersion;
  std::string command;
  std::string status;  // "ok", "failed" or "error"
  nlohmann::json config;
  std::optional<SolutionRecord> solution;
  std::vector<CheckResult> checks;
  std::optional<ErrorRecord> error;
  double timing_ms = 0.0;

  bool operator==(const RunReport&) const = default;
};

nlohmann::json to_json(const RunReport& report);
/// Inverse of `to_json`; throws InputError on a malformed document.
RunReport report_from_json(const nlohmann::json& doc);

/// JSON output has sorted keys and a trailing newline.
std::string emit_report(const RunReport& report, ReportFormat format);

/// The JSON text with `timing_ms` removed, for determinism comparisons.
std::string canonical_json(const RunReport& report);

/// 0 when status is "ok", 1 for failed checks or residuals, 2 for errors.
int exit_code(const RunReport& report);

}  // namespace ellinc
