#pragma once

#include <iosfwd>

namespace semm::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kInvalidInput = 2 };

/// Entry point of the `semm` tool. Subcommands: simulate, sweep, suppression,
/// tomography, cancel-solve, noise, table.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace semm::cli
