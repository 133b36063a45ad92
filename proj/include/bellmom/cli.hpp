#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bellmom::cli {

/// Exit codes.
inline constexpr int kExpected = 0;
inline constexpr int kUnexpected = 1;
inline constexpr int kUsage = 2;
inline constexpr int kNumerical = 3;

/// Name of the optional environment variable holding the directory that
/// relative output paths are written under.
inline constexpr const char* kOutputDirEnv = "BELLMOM_OUTPUT_DIR";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bellmom::cli
