#include "eqc/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace eqc {

namespace {

// Quotes a field only when it contains a separator, quote or newline.
std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> columns{
        "experiment", "n",         "rho",     "r",     "tau2_mode", "tau2", "p",
        "theta",      "grid_param", "replicate", "value", "stderr",   "reps", "seed"};
    return columns;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : csv_columns()) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

std::string csv_line(const CsvRow& row) {
    std::string out;
    auto add = [&](const std::string& field) {
        if (!out.empty()) out += ',';
        out += escape(field);
    };
    add(row.experiment);
    add(std::to_string(row.n));
    add(format_double(row.rho));
    add(format_double(row.r));
    add(row.tau2_mode);
    add(format_double(row.tau2));
    add(format_double(row.p));
    add(format_double(row.theta));
    add(row.grid_param);
    add(row.replicate);
    add(format_double(row.value));
    add(format_double(row.stderr_value));
    add(std::to_string(row.reps));
    add(std::to_string(row.seed));
    return out;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& row : rows) out << csv_line(row) << '\n';
}

}  // namespace eqc
