#pragma once

#include <ostream>

namespace aspir {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitNoAnswer = 1, kExitUsage = 2, kExitLimit = 3 };

// Subcommands: solve, meta-check, query, explain, chain, bench. Results go to
// `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aspir
