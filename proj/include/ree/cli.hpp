#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ree {

inline constexpr const char* kToolVersion = "0.1.0";

// Dispatches one CLI invocation (argv without the program name).
// Exit codes: 0 success, 2 input/usage/parse error, 3 not-a-state,
// 4 support error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ree
