#pragma once

#include <iosfwd>

namespace ewifg::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kUsageOrDomainError = 2,
  kNonConvergence = 3,
};

/// Parses argv and runs one subcommand, writing results to `out` and
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ewifg::cli
