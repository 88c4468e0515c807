#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace energyspace::cli {

/// Exit codes: 0 pass, 1 certified failure, 2 usage or input error.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kError = 2;

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace energyspace::cli
