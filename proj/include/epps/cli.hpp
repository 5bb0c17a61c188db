#pragma once

#include <string>
#include <vector>

namespace epps::cli {

// Runs one CLI invocation; args exclude the program name. Returns the
// process exit code (0 on success, nonzero when any error contract fires).
int run(const std::vector<std::string>& args);

int run(int argc, char** argv);

// "start:stop:step" (inclusive of stop when it lands on the grid) or a
// single value.
std::vector<double> parse_h_grid(const std::string& text);

}  // namespace epps::cli
