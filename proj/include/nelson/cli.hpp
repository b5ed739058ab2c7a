#pragma once

#include <ostream>

namespace nelson {

/// nelson-lab entry point. Exit status: 0 all checks pass, 1 a check or run
/// failed, 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nelson
