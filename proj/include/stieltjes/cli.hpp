#pragma once

#include <ostream>

namespace stieltjes {

/// Runs the command line front end. Output that is not sent to a file goes to
/// `out`; error reports (JSON) go to `err`. Returns 0 on success, 1 on invalid
/// input and 2 on numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stieltjes
