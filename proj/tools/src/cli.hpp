#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adfs::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfigError = 2, kNumericFailure = 3, kOracleMismatch = 4 };

/// Runs the command line with args excluding the program name. Reports go
/// to `out` (or files under --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adfs::cli
