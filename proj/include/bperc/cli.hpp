#pragma once

namespace bperc {

inline constexpr const char* kVersion = "0.1.0";

/// Parses and dispatches one CLI invocation. Returns the process exit code:
/// 0 success, 1 module error, 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace bperc
