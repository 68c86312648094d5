#pragma once

#include <iosfwd>

namespace dcclust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the dcclust tool: solve, bench, scaling and generate.
/// Returns 0 on success, 1 on a numerical failure, 2 on a configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcclust
