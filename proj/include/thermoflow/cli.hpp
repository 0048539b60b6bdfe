#pragma once

#include <iosfwd>

namespace thermoflow::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitNegative = 1;  // not convertible / failed validation
inline constexpr int kExitError = 2;

/// Entry point of the `thermoflow` command. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermoflow::cli
