#pragma once

#include <iosfwd>

namespace asag::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Entry point for the `asag` tool (tune, train, predict, evaluate).
/// Results go to `out`, diagnostics and progress to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace asag::cli
