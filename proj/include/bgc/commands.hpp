#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bgc {

// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitSolver = 3,
};

// Entry point shared by the bgc binary and the tests. args excludes the
// program name: {"cluster", "--input", "x.csv", "--k", "3"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bgc
