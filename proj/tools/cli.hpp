#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qamht::cli {

/// Runs one command line (without the program name) and returns the exit
/// status: 0 success, 2 usage, 3 input data, 4 capacity, 5 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qamht::cli
