#pragma once

#include <ostream>

namespace plancluster::cli {

/// Exit codes: 0 success, 1 internal error, 2 user or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plancluster::cli
