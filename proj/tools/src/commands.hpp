#pragma once

#include <iosfwd>

namespace turnid::cli {

/// Runs the command line. Returns the process exit code: 0 on success, 1 on a
/// pipeline error, 2 on a usage or I/O error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace turnid::cli
