#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nlfv/error.hpp"

namespace nlfv::io {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_cell(const std::optional<double>& x) { return x ? format_number(*x) : std::string{}; }

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_) throw SolverFailure("cannot open '" + path + "' for writing");
    }

    void header(const std::vector<std::string>& names) { row(names); }

    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
        if (!out_) throw SolverFailure("write failed");
    }

    void numbers(const std::vector<double>& xs)
    {
        std::vector<std::string> cells;
        cells.reserve(xs.size());
        for (double x : xs) cells.push_back(format_number(x));
        row(cells);
    }

private:
    std::ofstream out_;
};

} // namespace nlfv::io
