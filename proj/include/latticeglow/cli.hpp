#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latticeglow {

// Exit codes of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1; // validation or self-test failure
inline constexpr int exit_usage = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace latticeglow
