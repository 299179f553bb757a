#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsaae::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitData = 2,
  kExitNumeric = 3,
  kExitCompatibility = 4,
};

/// Runs one subcommand; `args` excludes the program name. Errors are reported
/// on `err` and mapped to an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsaae::cli
