#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlbisim::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,       ///< model errors and anything unexpected
    kExitUsage = 2,
    kExitParse = 3,
    kExitResource = 4,      ///< state, time, memory or iteration limit
    kExitVerification = 5,  ///< an emitted or supplied partition failed a check
    kExitIo = 6,
};

/// Entry point of the command-line tool. `args` excludes the program name.
/// Never throws; errors are reported on `err` and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlbisim::cli
