#pragma once

#include <ostream>

namespace ircr {

// Entry point of the `ircr` command. Returns 0 on success, 1 when the problem
// is infeasible or a check fails, 2 on malformed input.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ircr
