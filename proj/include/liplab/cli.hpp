#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liplab::cli {

/// Process exit codes of the liplab tool.
enum ExitCode : int {
  kOk = 0,
  kInvalidFlags = 2,
  kIoFailure = 3,
  kIdMismatch = 4,
  kVerificationFailed = 5,
  kThresholdTooCoarse = 6,
};

/// Runs one command. args excludes the program name, e.g. {"gen", "--kind", "path", "--n", "5"}.
/// Results go to `out` unless an --out/--report path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liplab::cli
