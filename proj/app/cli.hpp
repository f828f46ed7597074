// Command-line front end. Exit codes: 0 success, 2 configuration or usage
// error, 3 numerical failure; errors go to `err` as one JSON line.
#pragma once

#include <iosfwd>

namespace planar {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace planar
