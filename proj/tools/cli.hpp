#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wisig::cli {

enum ExitCode : int {
  kSuccess = 0,
  kPartialFailure = 1,
  kInvalidInput = 2,
  kTrainingFailure = 3,
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`, the resolved-config echo and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wisig::cli
