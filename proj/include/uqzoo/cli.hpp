#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uqzoo::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (program name excluded). Data goes to `out`,
/// diagnostics to `err`. Subcommands: list-methods, quantify, evaluate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uqzoo::cli
