#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace enumkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConflict = 1;
inline constexpr int kExitNotFound = 2;
inline constexpr int kExitAuth = 3;
inline constexpr int kExitUsage = 4;
inline constexpr int kExitTimeout = 5;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace enumkit::cli
