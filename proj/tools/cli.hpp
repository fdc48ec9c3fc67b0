#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eqc/simulation.hpp"

namespace eqc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Parses the flat `key = value` experiment format. Blank lines and text after
// '#' are ignored; repeating a grid key (n, rho, tau2, theta, d_schedule)
// appends to its grid, repeating any other key is an error. Errors carry
// "<source>:<line>: ..." and are thrown as ParameterError.
ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config(const std::string& path);

// Entry point shared by the executable and the tests. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eqc::cli
