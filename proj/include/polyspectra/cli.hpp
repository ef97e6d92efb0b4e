#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyspectra {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitPrecondition = 4;

/// Runs one command; args excludes the program name. Files are written only
/// when the whole command succeeds.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyspectra
