#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relev::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitInconclusive = 4,
};

/// Runs one command line (without the program name). Output paths given as
/// "-" go to `out`; diagnostics go to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Thread count from RELEV_THREADS; 0 (OpenMP default) when unset.
/// Throws ConfigError for anything but a positive integer.
int threads_from_env();

}  // namespace relev::cli
