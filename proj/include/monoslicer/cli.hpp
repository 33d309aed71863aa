#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace monoslicer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// args excludes the program name. Output files named by flags are written
/// directly; everything else goes to out/err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace monoslicer::cli
