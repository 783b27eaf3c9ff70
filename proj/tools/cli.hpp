#pragma once

#include <string>
#include <vector>

namespace gazeaware::cli {

/// Runs the command line given argv minus the program name. Returns the
/// process exit code: 0 success, 1 input error, 2 numerical failure.
int run(const std::vector<std::string>& args);

}  // namespace gazeaware::cli
