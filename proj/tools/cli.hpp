#pragma once

#include <ostream>

namespace wed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Parses argv, runs one subcommand and writes its artifacts under
/// --output-dir. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wed::cli
