#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opkit::cli {

/// Exit statuses of the command-line tool.
enum Exit : int {
  ok = 0,
  numerical_failure = 1,  ///< an asserted property failed; the claim id is printed
  parse_failure = 2,      ///< bad flags or malformed input files
  hypothesis_failure = 3, ///< hypotheses, resonance or model screens not met
};

/// Runs the tool on argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opkit::cli
