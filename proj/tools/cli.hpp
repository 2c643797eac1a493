#pragma once

#include <iosfwd>

namespace trigkrylov::cli {

/// Entry point of the trigkrylov command line tool. Output goes to `out` and
/// diagnostics to `err`; the return value is the process exit status
/// (0 success, 1 runtime failure, 2 usage error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trigkrylov::cli
