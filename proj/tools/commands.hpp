#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jumpstop::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_inadmissible = 2;

/// jumpstop validate|solve|statics|simulate <config.json> [flags]
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Same, with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jumpstop::cli
