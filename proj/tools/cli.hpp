#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmoney::cli {

// Exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitMismatch = 4;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qmoney::cli
