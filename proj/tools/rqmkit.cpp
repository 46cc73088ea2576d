#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rqm/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace rqm::cli;

  CLI::App app{"rqmkit: random quantum maps between finite-dimensional C*-algebras"};
  std::string command;
  std::string spec_path;
  std::string out_path;
  Overrides overrides;
  bool timing = false;
  bool quiet = false;

  std::vector<std::string> choices = command_names();
  choices.push_back("all");
  app.add_option("command", command, "Command to run from the problem file's command list")
      ->required()
      ->check(CLI::IsMember(choices));
  app.add_option("spec", spec_path, "Problem description (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Write the JSON report here");
  app.add_option("--seed", overrides.seed, "Seed for random fixtures and sampled checks");
  app.add_option("--tolerance", overrides.tolerance, "Tolerance for every check")->check(CLI::PositiveNumber);
  app.add_option("--dim-cap", overrides.dim_cap, "Largest admissible algebra dimension");
  app.add_option("--depth", overrides.depth, "Truncation depth for chains and skew products");
  app.add_flag("--timing", timing, "Include wall times in the JSON report");
  app.add_flag("-q,--quiet", quiet, "Suppress the summary on standard output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitSpecError;
  }

  RunResult result;
  try {
    Problem problem = load_problem(spec_path, overrides);
    RunOptions run;
    run.command = command;
    run.timing = timing;
    result = run_problem(problem, run);
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    result.report = {{"schema_version", kReportSchemaVersion},
                     {"command", command},
                     {"pass", false},
                     {"error", {{"kind", "spec-error"}, {"where", e.where()}, {"message", e.what()},
                                {"check_id", e.check_id()}}}};
    result.exit_code = kExitSpecError;
  }

  if (!quiet) {
    for (const std::string& line : result.summary) std::cout << line << '\n';
    std::cout << (result.exit_code == kExitPass ? "all checks passed" : "exit status " + std::to_string(result.exit_code))
              << '\n';
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << '\n';
      return kExitSpecError;
    }
    out << result.report.dump(2) << '\n';
  }
  return result.exit_code;
}
