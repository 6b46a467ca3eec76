#pragma once

#include <exception>

namespace automlp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

// Usage for configuration and argument errors, data for I/O, parse, lookup
// and sampling errors, numerical for non-finite values, failure otherwise.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace automlp::cli
