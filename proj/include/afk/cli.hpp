#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace afk {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_io = 1,          // unreadable file, malformed input or command line
  exit_validation = 2,  // invalid diagram, argument out of range, failed verification
  exit_inexact = 3,     // --strict and some verdict is only horizon-certified
  exit_cost_guard = 4,  // requested computation exceeds the size limits
};

inline constexpr std::size_t max_fredholm_level = 8;
inline constexpr std::size_t max_k_limit = 12;
inline constexpr std::size_t max_horizon = 1024;

/// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace afk
