#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairdyn::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kNumerical = 2 };

/// Entry point of the `fairdyn` tool. Summaries go to `out`; warnings and
/// the error JSON go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairdyn::cli
