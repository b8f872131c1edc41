#pragma once

#include <ostream>

namespace mdlatlrr::app {

/// Runs the command line and returns the process exit status: 0 success,
/// 2 argument error, 3 data error, 4 numerical failure (1 for anything
/// unexpected). Records go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mdlatlrr::app
