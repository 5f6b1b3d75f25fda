#pragma once

#include <iosfwd>

namespace ghzperc::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitViolations = 1,  ///< validate-partition found problems
  kExitConfig = 2,
  kExitSimulation = 3,
};

/// Entry point of the `ghzperc` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ghzperc::cli
