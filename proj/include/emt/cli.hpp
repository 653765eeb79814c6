#pragma once

// Command-line front end for emt-verify.
//
// Exit codes: 0 every check passed, 1 one or more checks failed, 2 usage or
// configuration error (no report is written), 3 a scenario gate failed under
// --strict-gates.

#include <ostream>
#include <string>
#include <vector>

namespace emt {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGate = 3;

/// Runs the tool with `args` (excluding the program name). The report goes
/// to `--out` when given, otherwise to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emt
