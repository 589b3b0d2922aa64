#pragma once

#include <ostream>

namespace freespectra::cli {

// Exit codes: 0 pass, 1 fail with report, 2 input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freespectra::cli
