#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsinsure::cli {

// Runs one command line; returns 0 on success, 1 on validation or usage
// errors and 2 when a solver fails to converge.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding)
std::vector<double> parse_grid(const std::string& text);

}  // namespace rsinsure::cli
