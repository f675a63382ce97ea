#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smvc::cli {

/// Exit codes of the command-line tool.
enum Exit : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Runs the tool with `args` (without the program name). Results go to `out`,
/// human-readable and JSON error records to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smvc::cli
