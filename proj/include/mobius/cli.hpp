#pragma once

#include <iosfwd>

namespace mobius::cli {

/// Exit codes returned by `run`.
enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kValidation = 2,
  kCollision = 3,
  kConvergence = 4,
  kIo = 5,
};

/// Parses arguments, runs one command and writes its files under --out.
/// Nothing is written unless the whole command succeeds.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mobius::cli
