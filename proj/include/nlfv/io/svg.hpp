#pragma once

// Minimal SVG line-plot emitter.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nlfv/error.hpp"

namespace nlfv::io {

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::string colour = "#1f77b4";
    bool dashed = false;
    bool markers = false;
};

struct Plot {
    std::string title, x_label, y_label;
    bool log_x = false, log_y = false;
    std::vector<Series> series;
    double width = 640, height = 420;
};

namespace detail {
inline std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}
} // namespace detail

inline std::string render(const Plot& p)
{
    const double left = 70, right = 20, top = 40, bottom = 50;
    auto tx = [&](double v) { return p.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return p.log_y ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((p.log_x && !(s.x[i] > 0)) || (p.log_y && !(s.y[i] > 0))) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x1 >= x0)) x0 = 0, x1 = 1;
    if (!(y1 >= y0)) y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double w = p.width - left - right, h = p.height - top - bottom;
    auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * w; };
    auto py = [&](double v) { return top + (1.0 - (ty(v) - y0) / (y1 - y0)) * h; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << p.width << "\" height=\"" << p.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << p.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(p.title)
      << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double lx = p.log_x ? std::pow(10.0, fx) : fx, ly = p.log_y ? std::pow(10.0, fy) : fy;
        const double sx = left + w * k / 4.0, sy = top + h * (1.0 - k / 4.0);
        o << "<text x=\"" << sx << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\">" << detail::num(lx)
          << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << detail::num(ly)
          << "</text>\n";
    }
    o << "<text x=\"" << left + w / 2 << "\" y=\"" << p.height - 10 << "\" text-anchor=\"middle\">"
      << detail::escape(p.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << top + h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + h / 2
      << ")\">" << detail::escape(p.y_label) << "</text>\n";

    double legend_y = top + 14;
    for (const auto& s : p.series) {
        std::ostringstream d;
        bool pen_up = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((p.log_x && !(s.x[i] > 0)) || (p.log_y && !(s.y[i] > 0)) || !std::isfinite(s.y[i])) {
                pen_up = true;
                continue;
            }
            d << (pen_up ? "M" : "L") << detail::num(px(s.x[i])) << ' ' << detail::num(py(s.y[i])) << ' ';
            pen_up = false;
        }
        o << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
        if (s.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (!(p.log_x && !(s.x[i] > 0)) && !(p.log_y && !(s.y[i] > 0)) && std::isfinite(s.y[i]))
                    o << "<circle cx=\"" << detail::num(px(s.x[i])) << "\" cy=\"" << detail::num(py(s.y[i]))
                      << "\" r=\"3\" fill=\"" << s.colour << "\"/>\n";
        if (!s.label.empty()) {
            o << "<line x1=\"" << left + w - 150 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << left + w - 125
              << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.colour << "\""
              << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
            o << "<text x=\"" << left + w - 120 << "\" y=\"" << legend_y << "\">" << detail::escape(s.label)
              << "</text>\n";
            legend_y += 16;
        }
    }
    o << "</svg>\n";
    return o.str();
}

/// Piecewise-constant graph: one horizontal segment per cell.
inline Series step_series(const std::vector<double>& edges_lo, double width, const std::vector<double>& values,
                          std::string label, std::string colour)
{
    Series s{std::move(label), {}, {}, std::move(colour)};
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.x.push_back(edges_lo[i]);
        s.y.push_back(values[i]);
        s.x.push_back(edges_lo[i] + width);
        s.y.push_back(values[i]);
    }
    return s;
}

inline void write_svg(const std::string& path, const Plot& p)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverFailure("cannot open '" + path + "' for writing");
    out << render(p);
}

} // namespace nlfv::io
