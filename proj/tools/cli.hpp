#pragma once

#include <iosfwd>

namespace ebtest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSolver = 3;

/// Entry point of the ebtest tool with explicit streams, so tests can drive it
/// in-process. Reports go to `out` unless --out is given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ebtest::cli
