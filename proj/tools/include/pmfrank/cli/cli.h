#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmfrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one command. args excludes the program name. Primary output goes to
// out, diagnostics to err. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmfrank::cli
