#pragma once

#include <ostream>

namespace rmq::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitStatistical = 3;

/// Entry point of the `rmq` tool; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rmq::app
