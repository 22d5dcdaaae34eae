#pragma once

#include <iosfwd>

namespace riskmdp::cli {

inline constexpr int kExitOk = 0;
/// A verification report came back negative, or outputs could not be written.
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNotConverged = 3;

/// Entry point behind the `riskmdp` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace riskmdp::cli
