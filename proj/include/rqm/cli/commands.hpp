#pragma once

// Runs the command list of a loaded problem and assembles the report.

#include <string>
#include <vector>

#include "rqm/cli/problem.hpp"

namespace rqm::cli {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitSpecError = 2, kExitNumericalFailure = 3 };

/// Commands accepted in a problem file's "commands" list and on the command line.
const std::vector<std::string>& command_names();

struct RunOptions {
  /// A command name, or "all" for every command in declaration order.
  std::string command = "all";
  /// Adds per-command wall time to the JSON report (which is then no longer
  /// reproducible byte for byte).
  bool timing = false;
};

struct RunResult {
  Json report;
  std::vector<std::string> summary;  // one human-readable line per command
  int exit_code = kExitPass;
};

/// Commands that store a product ("as") run even when filtered out, so later
/// commands can reference it; only matching commands are reported.
/// A spec error inside a command ends the run with kExitSpecError; the report
/// then carries the error and the outcomes so far.
RunResult run_problem(Problem& problem, const RunOptions& options);

}  // namespace rqm::cli
