#pragma once

#include <iosfwd>

namespace farmledger::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Machine-readable output goes to `out`; diagnostics and structured errors
/// go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace farmledger::cli
