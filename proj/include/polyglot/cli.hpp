#pragma once

#include <ostream>

namespace polyglot::cli {

/// Runs one command line. Data goes to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on usage errors and 2 on data errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polyglot::cli
