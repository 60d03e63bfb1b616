#pragma once

#include <ostream>

namespace htnc::cli {

// Exit codes: 0 success, 2 usage, 3 instability or domain error, 4 I/O.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace htnc::cli
