#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace squidmech::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,            ///< bad arguments, config or input file
  kDomain = 2,           ///< model domain violation
  kNonConvergence = 3,   ///< fit or controller failed to converge
};

/// Runs one `squidmech` invocation. Results go to `out` unless --out names a
/// file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace squidmech::cli
