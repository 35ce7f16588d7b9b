#pragma once

#include <string>
#include <vector>

namespace delaydim {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O or other unexpected failure
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitConsistency = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputEnv = "DELAYDIM_OUT";

/// Runs one subcommand; args excludes the program name. Errors are reported
/// on stderr and mapped to ExitCode.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace delaydim
