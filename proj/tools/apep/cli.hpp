#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apep {

/// Runs one command line (without the program name). Exit codes: 0 ok,
/// 1 internal error, 2 usage or input error, 3 search-space guard.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apep
