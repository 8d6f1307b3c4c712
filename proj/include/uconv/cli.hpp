#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uconv {

inline constexpr const char* kVersion = "uconv 1.0.0";

/// Exit codes: 0 success, 2 validation error, 3 numeric error,
/// 4 a certification rejected a predicted property.
enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3, kExitRejected = 4 };

/// Runs one CLI invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uconv
