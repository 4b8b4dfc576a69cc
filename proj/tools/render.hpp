#pragma once

#include <string>
#include <vector>

namespace ghostsnr::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// %.9g, with nan/inf spelled the same way on every platform.
std::string format_number(double v);
std::string to_csv(const Table& t);
void write_file(const std::string& path, const std::string& content);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Log-log line chart. Non-positive or non-finite points are skipped.
std::string svg_loglog(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series);

}  // namespace ghostsnr::cli
