#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "nlfv/error.hpp"

namespace nlfv {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

/// Uniform cell-centred mesh of [x_min, x_max). Cell i has centre
/// x_min + (i + 1/2) dx. Periodic grids are the torus and must span 2*pi.
struct Grid1D {
    std::size_t n_cells = 0;
    double x_min = 0.0;
    double x_max = two_pi;
    bool periodic = true;

    static Grid1D torus(std::size_t n, double origin = 0.0) { return {n, origin, origin + two_pi, true}; }
    static Grid1D line(std::size_t n, double lo, double hi) { return {n, lo, hi, false}; }

    double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
    double length() const { return x_max - x_min; }
    double center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    double left_edge(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
    double cell_volume() const { return dx(); }
    std::size_t size() const { return n_cells; }

    // Index of neighbour i+offset, wrapping on periodic grids. Returns
    // n_cells when the neighbour falls off a non-periodic grid.
    std::size_t neighbour(std::size_t i, long offset) const
    {
        const long n = static_cast<long>(n_cells);
        long j = static_cast<long>(i) + offset;
        if (periodic) return static_cast<std::size_t>(((j % n) + n) % n);
        return (j < 0 || j >= n) ? n_cells : static_cast<std::size_t>(j);
    }

    // Map x into [x_min, x_max) on the torus; identity otherwise.
    double wrap(double x) const
    {
        if (!periodic) return x;
        double y = std::fmod(x - x_min, length());
        if (y < 0) y += length();
        if (y >= length()) y = 0.0;
        return x_min + y;
    }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

inline void validate(const Grid1D& g)
{
    require(g.n_cells > 0, "grid: n_cells must be positive");
    require(std::isfinite(g.x_min) && std::isfinite(g.x_max), "grid: bounds must be finite");
    require(g.x_max > g.x_min, "grid: x_max must exceed x_min");
    if (g.periodic)
        require(std::abs(g.length() - two_pi) <= 1e-12 * two_pi,
                "grid: periodic grid must span 2*pi (length " + std::to_string(g.length()) + ")");
}

/// Tensor grid: first axis is the phase (usually periodic), second the
/// natural frequency (usually truncated). Storage is row-major, theta
/// outermost: index(i, j) = i * ny + j.
struct Grid2D {
    Grid1D theta;
    Grid1D omega;

    std::size_t nx() const { return theta.n_cells; }
    std::size_t ny() const { return omega.n_cells; }
    std::size_t size() const { return nx() * ny(); }
    double dx() const { return theta.dx(); }
    double dy() const { return omega.dx(); }
    double cell_volume() const { return dx() * dy(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * ny() + j; }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

inline void validate(const Grid2D& g)
{
    validate(g.theta);
    validate(g.omega);
}

inline bool same_domain(const Grid1D& a, const Grid1D& b)
{
    const double tol = 1e-12 * std::max(1.0, std::abs(a.length()));
    return a.periodic == b.periodic && std::abs(a.x_min - b.x_min) <= tol && std::abs(a.x_max - b.x_max) <= tol;
}

} // namespace nlfv
