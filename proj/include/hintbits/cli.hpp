#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hintbits {

// Process exit statuses shared by every subcommand.
enum ExitStatus : int {
  kExitOk = 0,
  kExitDefect = 1,
  kExitBadInput = 2,
  kExitNothingBound = 3,
};

// Entry point behind the `hintbits` executable. Reports go to `out` unless
// --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace hintbits
