// Command line front end: ellinc solve|verify|oracle-check --config PATH.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ellinc/run_config.hpp"

namespace {

struct Args {
  std::string config;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string report;
  std::string format = "json";
};

void add_common(CLI::App* sub, Args& args) {
  sub->add_option("--config", args.config, "problem config (JSON)")->required();
  sub->add_option("--tol", args.tol, "override solver.tol");
  sub->add_option("--seed", args.seed, "override solver.seed");
  sub->add_option("--report", args.report, "write the report here instead of stdout");
  sub->add_option("--format", args.format, "report format")
      ->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver for elliptic inclusions with monotone coefficient relations"};
  app.require_subcommand(1);
  Args args;
  CLI::App* solve = app.add_subcommand("solve", "solve the configured problem and run its checks");
  CLI::App* verify = app.add_subcommand("verify", "solve and verify the certificate and checks");
  CLI::App* oracle = app.add_subcommand("oracle-check", "compare against a brute-force oracle");
  for (CLI::App* sub : {solve, verify, oracle}) add_common(sub, args);
  CLI11_PARSE(app, argc, argv);

  ellinc::RunMode mode = ellinc::RunMode::Solve;
  if (verify->parsed()) mode = ellinc::RunMode::Verify;
  if (oracle->parsed()) mode = ellinc::RunMode::OracleCheck;

  const ellinc::RunReport report =
      ellinc::run_config(args.config, mode, ellinc::RunOverrides{args.tol, args.seed});
  const std::string text = ellinc::emit_report(
      report, args.format == "text" ? ellinc::ReportFormat::Text : ellinc::ReportFormat::Json);

  if (args.report.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.report, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "ellinc: cannot write report to " << args.report << "\n";
      return 2;
    }
    if (report.error) std::cerr << "ellinc: " << report.error->code << ": " << report.error->message << "\n";
  }
  return ellinc::exit_code(report);
}
