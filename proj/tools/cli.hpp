#pragma once

#include <ostream>

namespace sarms::cli {

/// Runs the sarms3d command line. Returns 0 on success, 1 when a command
/// fails (or a check does not hold), 2 for usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sarms::cli
