#pragma once

namespace bcnls::cli {

/// Exit codes of `run`.
enum ExitCode : int {
  ok = 0,
  usage = 1,
  invalid = 2,
  no_convergence = 3,
  aborted = 4,
  check_failed = 5,
};

/// Entry point behind the `bcnls` executable: groundstate, classify-beta, gn, evolve, check.
int run(int argc, char** argv);

}  // namespace bcnls::cli
