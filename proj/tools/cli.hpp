#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace facetcvt::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kUsageError = 2,
  kPipelineError = 3,
};

/// Runs the facetcvt command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:step", inclusive of b up to rounding. Throws InvalidArgument.
std::vector<double> parse_grid(const std::string& text);

}  // namespace facetcvt::cli
