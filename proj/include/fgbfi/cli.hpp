#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fgbfi {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitVerifyFailed = 2,
  kExitBallEscape = 3,
  kExitConfig = 4,
  kExitParse = 5,
};

/// Runs the command-line front end. `args` excludes the program name. Data goes to
/// `out` unless --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgbfi
