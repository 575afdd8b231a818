#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace instab::cli {

// Exit codes of the command-line tool.
enum Exit : int {
  kOk = 0,
  kError = 1,           // bad flags, parse errors, dimension mismatches
  kLikelyStable = 2,    // classify / certify on a stable-looking vector
  kNumerical = 3,       // classify: unstable only by the numeric sphere search
  kZeroVector = 4,
  kMalformedCert = 5,
  kCheckFailed = 6,     // verify or busemann-check found violations
};

/// Runs one subcommand. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace instab::cli
