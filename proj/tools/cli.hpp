#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace itree::cli {

/// Runs the `itree` command line. `args` excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace itree::cli
