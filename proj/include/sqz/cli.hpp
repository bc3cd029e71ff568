#pragma once

namespace sqz {

// Command-line entry point.  Exit codes: 0 success, 2 usage error, 3 file or
// format problem, 4 numeric/physics domain error.
int run_cli(int argc, const char* const* argv);

}  // namespace sqz
