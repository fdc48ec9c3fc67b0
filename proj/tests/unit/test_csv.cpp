#include <gtest/gtest.h>

#include <clocale>
#include <cmath>
#include <limits>
#include <locale>
#include <sstream>

#include "eqc/csv.hpp"

namespace eqc {
namespace {

TEST(Csv, HeaderColumnOrder) {
    EXPECT_EQ(csv_header(),
              "experiment,n,rho,r,tau2_mode,tau2,p,theta,grid_param,replicate,value,stderr,reps,seed");
    EXPECT_EQ(csv_columns().size(), 14u);
}

TEST(Csv, FormatsShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(0.0), "0");
    EXPECT_EQ(format_double(-2.5), "-2.5");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    for (double v : {1.0 / 3.0, 12.816961524, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Csv, LineLayout) {
    CsvRow row;
    row.experiment = "fpp";
    row.n = 1000;
    row.rho = 0.5;
    row.r = 0.5;
    row.tau2_mode = "fixed";
    row.tau2 = 1.0;
    row.p = 0.5;
    row.theta = 0.0;
    row.grid_param = "series=simulated";
    row.value = 0.25;
    row.stderr_value = 0.01;
    row.reps = 100;
    row.seed = 7;
    EXPECT_EQ(csv_line(row), "fpp,1000,0.5,0.5,fixed,1,0.5,0,series=simulated,agg,0.25,0.01,100,7");
}

TEST(Csv, IgnoresGlobalLocale) {
    CsvRow row;
    row.value = 1234.5;
    const std::string before = csv_line(row);
    const char* previous = std::setlocale(LC_ALL, nullptr);
    const std::string saved = previous ? previous : "C";
    if (std::setlocale(LC_ALL, "de_DE.UTF-8") != nullptr) {
        EXPECT_EQ(csv_line(row), before);
        std::setlocale(LC_ALL, saved.c_str());
    }
    std::ostringstream out;
    write_csv(out, {row});
    EXPECT_EQ(out.str(), csv_header() + "\n" + before + "\n");
}

}  // namespace
}  // namespace eqc
