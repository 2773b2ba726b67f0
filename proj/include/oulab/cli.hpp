#pragma once

#include <iosfwd>

namespace oulab {

/// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitGuard = 3,
  kExitSolver = 4,
};

/// Entry point of `oulab <command> --config FILE [--out DIR] [--seed N]`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace oulab
