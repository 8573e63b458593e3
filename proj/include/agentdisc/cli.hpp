#pragma once

#include <ostream>

namespace agentdisc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModelError = 1;
inline constexpr int kExitAlgorithmError = 2;

// Command-line entry point. Results go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace agentdisc
