#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace algebroid::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSchema = 2,
  kVerificationFailed = 3,
  kNumerical = 4,
};

/// Runs one command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace algebroid::cli
