#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plankforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

/// Runs one subcommand. Reports go to --out (or `out` when absent), messages
/// to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace plankforge::cli
