#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace twostage {

/// Runs the command line tool on `args` (without the program name). Writes
/// CSV to `out` and diagnostics to `err`. Returns 0 on success, 1 on a
/// computation error and 2 on a usage error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace twostage
