#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mtgae::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kUsage = 2,
  kNumeric = 3,
  kArtifact = 4,
};

/// Runs one invocation. `args` excludes the program name, e.g.
/// {"train", "--config", "run.cfg"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtgae::cli
