#include "ellinc/report.hpp"

#include <cstdio>
#include <sstream>

#include "ellinc/errors.hpp"

namespace ellinc {

using nlohmann::json;

namespace {

json solution_json(const SolutionRecord& s) {
  return json{{"u", s.u},
              {"w", s.w},
              {"certificate", {{"x", s.certificate_x}, {"y", s.certificate_y},
                               {"residual", s.certificate_residual}}},
              {"iterations", s.iterations},
              {"diagnostics", s.diagnostics}};
}

SolutionRecord solution_from(const json& j) {
  SolutionRecord s;
  j.at("u").get_to(s.u);
  j.at("w").get_to(s.w);
  const json& cert = j.at("certificate");
  cert.at("x").get_to(s.certificate_x);
  cert.at("y").get_to(s.certificate_y);
  cert.at("residual").get_to(s.certificate_residual);
  j.at("iterations").get_to(s.iterations);
  j.at("diagnostics").get_to(s.diagnostics);
  return s;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string format_vector(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out + "]";
}

std::string text_report(const RunReport& r) {
  std::ostringstream out;
  out << "command: " << r.command << "\nstatus: " << r.status << "\n";
  if (r.error) {
    out << "error: " << r.error->code << " (" << r.error->kind << "): " << r.error->message << "\n";
    if (!r.error->field.empty()) out << "  field: " << r.error->field << "\n";
    if (r.error->line > 0) out << "  line: " << r.error->line << "\n";
  }
  if (r.solution) {
    const SolutionRecord& s = *r.solution;
    out << "u = " << format_vector(s.u) << "\n";
    out << "certificate residual: " << format_number(s.certificate_residual) << "\n";
    out << "iterations: " << s.iterations << "\n";
    for (const auto& [k, v] : s.diagnostics) out << "  " << k << " = " << format_number(v) << "\n";
  }
  for (const CheckResult& c : r.checks) {
    out << "check " << c.name << ": " << (c.pass ? "pass" : "FAIL") << "\n";
    if (!c.error.empty()) out << "  error: " << c.error << "\n";
    for (const auto& [k, v] : c.values) out << "  " << k << " = " << format_number(v) << "\n";
  }
  out << "time: " << format_number(r.timing_ms) << " ms\n";
  return out.str();
}

}  // namespace

json to_json(const RunReport& r) {
  json j = json::object();
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["status"] = r.status;
  j["config"] = r.config;
  j["checks"] = json::array();
  for (const CheckResult& c : r.checks) {
    json cj{{"name", c.name}, {"pass", c.pass}, {"values", c.values}};
    if (!c.error.empty()) cj["error"] = c.error;
    j["checks"].push_back(std::move(cj));
  }
  if (r.solution) j["solution"] = solution_json(*r.solution);
  if (r.error) {
    j["error"] = {{"code", r.error->code},
                  {"kind", r.error->kind},
                  {"message", r.error->message},
                  {"field", r.error->field},
                  {"line", r.error->line}};
  }
  j["timing_ms"] = r.timing_ms;
  return j;
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    j.at("schema_version").get_to(r.schema_version);
    j.at("command").get_to(r.command);
    j.at("status").get_to(r.status);
    r.config = j.at("config");
    for (const json& cj : j.at("checks")) {
      CheckResult c;
      cj.at("name").get_to(c.name);
      cj.at("pass").get_to(c.pass);
      cj.at("values").get_to(c.values);
      if (cj.contains("error")) cj.at("error").get_to(c.error);
      r.checks.push_back(std::move(c));
    }
    if (j.contains("solution")) r.solution = solution_from(j.at("solution"));
    if (j.contains("error")) {
      const json& e = j.at("error");
      ErrorRecord er;
      e.at("code").get_to(er.code);
      e.at("kind").get_to(er.kind);
      e.at("message").get_to(er.message);
      e.at("field").get_to(er.field);
      e.at("line").get_to(er.line);
      r.error = std::move(er);
    }
    j.at("timing_ms").get_to(r.timing_ms);
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what(), "malformed_report");
  }
}

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::Text) return text_report(report);
  return to_json(report).dump(2) + "\n";
}

std::string canonical_json(const RunReport& report) {
  json j = to_json(report);
  j.erase("timing_ms");
  return j.dump(2) + "\n";
}

int exit_code(const RunReport& report) {
  if (report.status == "ok") return 0;
  if (report.status == "failed") return 1;
  return 2;
}

}  // namespace ellinc
