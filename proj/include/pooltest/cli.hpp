#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pooltest/model.hpp"

namespace pooltest::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInputError = 2,
  kResourceGuard = 3,
  kReproductionFailure = 4,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads `{"p": [...]}` JSON or one decimal per line (blank lines and lines
/// starting with '#' are skipped). "-" reads standard input. Diagnostics name
/// the file and the offending line or entry.
ProbabilityVector read_probabilities(const std::string& path);

/// Parses a probability listing from memory; `source` names it in errors.
ProbabilityVector parse_probabilities(const std::string& text, const std::string& source);

}  // namespace pooltest::cli
