#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace npfaber::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     // numerical failure not covered below
  kInvalid = 2,     // bad arguments, malformed input, equal permittivities
  kResonance = 3,   // lambda on the spectrum of the section
  kCusp = 4,        // corner or cusp in curve input
};

/// Runs one subcommand. `args` excludes the program name. Output files are
/// written only after the whole computation has succeeded; without --out,
/// the primary result goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace npfaber::cli
