#pragma once

#include <iosfwd>

namespace mtrp::cli {

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 success, 1 configuration error, 2 runtime error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtrp::cli
