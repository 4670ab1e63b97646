#pragma once

#include <iosfwd>
#include <string_view>

#include "heun/core.hpp"

namespace heun::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kShortfall = 2 };

/// Runs the command line `argv[1..]` (reduce, qpoly, eval, spectrum).
/// Results go to `out` unless --output names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "x", "x+yi", "x-yi" or "yi". Throws InvalidArgument otherwise.
cplx parse_complex(std::string_view text);

}  // namespace heun::cli
