#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace despeckle::cli {

enum ExitCode : int { kOk = 0, kProcessingError = 1, kUsageError = 2 };

/// Runs one invocation. `args` excludes the program name. JSON goes to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace despeckle::cli
