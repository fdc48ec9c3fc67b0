#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace eqc {

/// One line of experiment output. Column order is fixed by csv_header().
struct CsvRow {
    std::string experiment;
    std::size_t n = 0;
    double rho = 0.0;
    double r = 0.0;
    std::string tau2_mode;
    double tau2 = 0.0;
    double p = 0.0;
    double theta = 0.0;
    std::string grid_param;
    std::string replicate = "agg";  // replicate index or "agg"
    double value = 0.0;
    double stderr_value = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_line(const CsvRow& row);
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);

// Shortest round-trip decimal representation, independent of the C++ or C
// locale ('.' separator, no grouping). nan and inf print as "nan", "inf".
std::string format_double(double value);

}  // namespace eqc
