#pragma once

#include <iosfwd>

#include "ncmetric/error.hpp"

namespace ncm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumerical = 4;

/// 2 for invariant violations, 3 for malformed or out-of-domain input, 4 for numerical failures.
int exit_code_for(ErrorKind kind);

/// Entry point of the command-line tool. Subcommands: delta, distance, contract, convolve, props,
/// counterexample. Writes results to `out` (or to --out) and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncm::cli
