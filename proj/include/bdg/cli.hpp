#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bdg {

// Runs the command line tool. `args` holds the arguments after the
// program name, in natural order. Returns the process exit code:
//   0  success
//   1  --strict was set and the analysis reported findings
//   2  unreadable input, malformed text or bad usage
//   3  the requested operation is impossible on the given model
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace bdg
