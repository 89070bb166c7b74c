#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harqfbl::cli {

/// Runs one command line (without the program name). CSV goes to `out` unless --out is
/// given; warnings and errors go to `err`.
/// Exit codes: 0 success, 1 usage error, 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace harqfbl::cli
