#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace socketlab::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 computation error, 2 input or usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace socketlab::cli
