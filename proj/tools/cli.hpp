#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ages::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitReplayMismatch = 4;
inline constexpr int kExitInternal = 5;

// Runs one command line (without the program name). Outputs without a file go
// to `out`; errors are printed to `err` as a single "error[<kind>]: ..." line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);

}  // namespace ages::cli
