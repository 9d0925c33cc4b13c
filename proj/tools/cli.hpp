#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rabi::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Runs the rabi-critic command line. `args` excludes the program name.
/// Tables go to `out` unless --output names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rabi::cli
