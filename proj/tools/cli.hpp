#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qleb::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { Ok = 0, Internal = 1, InputFailure = 2, CheckFailure = 3 };

/// Runs the `qleb` command line. Reports go to `out` (or the --out-file),
/// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qleb::cli
