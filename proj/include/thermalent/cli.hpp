#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace thermalent::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kNumericalFailure = 2,
  kInvariantViolation = 3,
};

/// Runs the command line `args` (args[0] is the program name). CSV goes to
/// `out` unless --output is given; warnings and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from THERMALENT_WORKERS, else the hardware concurrency (>= 1).
std::size_t worker_count();

/// Calls task(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

/// Round-trip decimal form with 17 significant digits.
std::string format_number(double value);

}  // namespace thermalent::cli
