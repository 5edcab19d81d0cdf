#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sepsell {

enum ExitCode { kExitOk = 0, kExitGuarantee = 1, kExitInput = 2, kExitSolver = 3 };

inline constexpr int kSchemaVersion = 1;

/// Entry point of the `sepsell` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sepsell
