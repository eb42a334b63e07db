#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <numeric>
#include <span>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/quadrature.hpp"

namespace nlfv {

/// Atomic measure sum_i masses[i] * delta(centre_i).
template <class Grid>
struct DiscreteMeasure {
    Grid grid;
    std::vector<double> masses;
};

/// Piecewise-constant L1 density given by its cell averages.
template <class Grid>
struct GridDensity {
    Grid grid;
    std::vector<double> values;
};

using Measure1D = DiscreteMeasure<Grid1D>;
using Measure2D = DiscreteMeasure<Grid2D>;
using Density1D = GridDensity<Grid1D>;
using Density2D = GridDensity<Grid2D>;

template <class Grid>
GridDensity<Grid> to_density(const DiscreteMeasure<Grid>& m)
{
    GridDensity<Grid> d{m.grid, m.masses};
    const double inv = 1.0 / m.grid.cell_volume();
    for (double& v : d.values) v *= inv;
    return d;
}

template <class Grid>
DiscreteMeasure<Grid> to_measure(const GridDensity<Grid>& d)
{
    DiscreteMeasure<Grid> m{d.grid, d.values};
    const double vol = d.grid.cell_volume();
    for (double& v : m.masses) v *= vol;
    return m;
}

template <class Grid>
double mass(const DiscreteMeasure<Grid>& m)
{
    return std::accumulate(m.masses.begin(), m.masses.end(), 0.0);
}

template <class Grid>
double mass(const GridDensity<Grid>& d)
{
    return std::accumulate(d.values.begin(), d.values.end(), 0.0) * d.grid.cell_volume();
}

inline double min_value(std::span<const double> v)
{
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

template <class Grid>
void validate(const DiscreteMeasure<Grid>& m)
{
    validate(m.grid);
    require(m.masses.size() == m.grid.size(), "measure: mass array does not match grid size");
    for (double v : m.masses) require(std::isfinite(v) && v >= 0.0, "measure: masses must be finite and nonnegative");
}

template <class Grid>
void validate(const GridDensity<Grid>& d)
{
    validate(d.grid);
    require(d.values.size() == d.grid.size(), "density: value array does not match grid size");
    for (double v : d.values) require(std::isfinite(v) && v >= 0.0, "density: values must be finite and nonnegative");
}

/// Inclusive index window [first, last] of cells holding nonzero mass.
struct IndexWindow {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t width() const { return last - first + 1; }
};

inline std::optional<IndexWindow> support_bounds(std::span<const double> masses)
{
    std::optional<IndexWindow> w;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (masses[i] > 0.0) {
            if (!w) w = IndexWindow{i, i};
            w->last = i;
        }
    }
    return w;
}

inline std::optional<IndexWindow> support_bounds(const Measure1D& m) { return support_bounds(m.masses); }

struct IndexBox {
    IndexWindow theta;
    IndexWindow omega;
};

inline std::optional<IndexBox> support_bounds(const Measure2D& m)
{
    std::optional<IndexBox> box;
    for (std::size_t i = 0; i < m.grid.nx(); ++i)
        for (std::size_t j = 0; j < m.grid.ny(); ++j) {
            if (m.masses[m.grid.index(i, j)] <= 0.0) continue;
            if (!box) box = IndexBox{{i, i}, {j, j}};
            box->theta.first = std::min(box->theta.first, i);
            box->theta.last = std::max(box->theta.last, i);
            box->omega.first = std::min(box->omega.first, j);
            box->omega.last = std::max(box->omega.last, j);
        }
    return box;
}

// ---------------------------------------------------------------------------
// Total variation

inline double total_variation(const Density1D& d)
{
    const auto& v = d.values;
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) tv += std::abs(v[i + 1] - v[i]);
    if (d.grid.periodic && v.size() > 1) tv += std::abs(v.front() - v.back());
    return tv;
}

inline double total_variation(const Density2D& d)
{
    const auto& g = d.grid;
    const auto& v = d.values;
    const std::size_t nx = g.nx(), ny = g.ny();
    double tv = 0.0;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double here = v[g.index(i, j)];
            if (i + 1 < nx || (g.theta.periodic && nx > 1))
                tv += std::abs(v[g.index((i + 1) % nx, j)] - here) * g.dy();
            if (j + 1 < ny || (g.omega.periodic && ny > 1))
                tv += std::abs(v[g.index(i, (j + 1) % ny)] - here) * g.dx();
        }
    return tv;
}

// ---------------------------------------------------------------------------
// Nested L1 distance: the coarse piecewise-constant function is replicated
// onto the fine grid and compared cell by cell.

inline double l1_distance_nested(const Density1D& coarse, const Density1D& fine)
{
    require(same_domain(coarse.grid, fine.grid), "l1_distance_nested: grids cover different domains");
    const std::size_t nc = coarse.grid.n_cells, nf = fine.grid.n_cells;
    require(nf >= nc && nf % nc == 0, "l1_distance_nested: fine resolution is not a multiple of coarse");
    const std::size_t r = nf / nc;
    double s = 0.0;
    for (std::size_t k = 0; k < nf; ++k) s += std::abs(coarse.values[k / r] - fine.values[k]);
    return s * fine.grid.dx();
}

inline double l1_distance_nested(const Density2D& coarse, const Density2D& fine)
{
    require(same_domain(coarse.grid.theta, fine.grid.theta) && same_domain(coarse.grid.omega, fine.grid.omega),
            "l1_distance_nested: grids cover different domains");
    const std::size_t cx = coarse.grid.nx(), cy = coarse.grid.ny();
    const std::size_t fx = fine.grid.nx(), fy = fine.grid.ny();
    require(fx >= cx && fx % cx == 0 && fy >= cy && fy % cy == 0,
            "l1_distance_nested: fine resolution is not a multiple of coarse");
    const std::size_t rx = fx / cx, ry = fy / cy;
    double s = 0.0;
    for (std::size_t i = 0; i < fx; ++i) {
        const double* frow = &fine.values[fine.grid.index(i, 0)];
        const double* crow = &coarse.values[coarse.grid.index(i / rx, 0)];
        for (std::size_t j = 0; j < fy; ++j) s += std::abs(crow[j / ry] - frow[j]);
    }
    return s * fine.grid.cell_volume();
}

// ---------------------------------------------------------------------------
// Time interpolation between two consecutive states.

template <class State>
struct TimeInterpolant {
    State state_prev;
    State state_next;
    double t_prev = 0.0;
    double t_next = 0.0;
};

namespace detail {
template <class Grid>
std::vector<double>& payload(DiscreteMeasure<Grid>& m) { return m.masses; }
template <class Grid>
const std::vector<double>& payload(const DiscreteMeasure<Grid>& m) { return m.masses; }
template <class Grid>
std::vector<double>& payload(GridDensity<Grid>& d) { return d.values; }
template <class Grid>
const std::vector<double>& payload(const GridDensity<Grid>& d) { return d.values; }
} // namespace detail

template <class State>
State interpolate_in_time(const TimeInterpolant<State>& ti, double t)
{
    require(ti.t_prev < ti.t_next, "interpolate_in_time: t_prev must be before t_next");
    require(t >= ti.t_prev && t <= ti.t_next, "interpolate_in_time: t outside [t_prev, t_next]");
    require(ti.state_prev.grid == ti.state_next.grid, "interpolate_in_time: states live on different grids");
    if (t == ti.t_prev) return ti.state_prev;
    if (t == ti.t_next) return ti.state_next;
    const double span = ti.t_next - ti.t_prev;
    const double w_next = (t - ti.t_prev) / span;
    const double w_prev = (ti.t_next - t) / span;
    State out = ti.state_prev;
    auto& o = detail::payload(out);
    const auto& b = detail::payload(ti.state_next);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = w_prev * o[k] + w_next * b[k];
    return out;
}

// ---------------------------------------------------------------------------
// Initial data and projections

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Initial measure: a finite set of atoms plus an optional density.
struct InitialDatum {
    std::vector<Atom> atoms;
    std::function<double(double)> density;

    double atom_mass() const
    {
        double s = 0.0;
        for (const auto& a : atoms) s += a.mass;
        return s;
    }
};

struct Atom2D {
    double theta = 0.0;
    double omega = 0.0;
    double mass = 0.0;
};

/// Two-dimensional initial measure. When both factor functions are set the
/// density is theta_factor(theta) * omega_factor(omega) and projections are
/// computed one axis at a time.
struct InitialDatum2D {
    std::vector<Atom2D> atoms;
    std::function<double(double, double)> density;
    std::function<double(double)> theta_factor;
    std::function<double(double)> omega_factor;

    bool separable() const { return static_cast<bool>(theta_factor) && static_cast<bool>(omega_factor); }
};

namespace detail {

// Hat weights of a point mass on the grid. On a line the boundary hats are
// extended to the domain edge so the weights always sum to one.
template <class Emit>
void split_atom(const Grid1D& g, double x, Emit&& emit)
{
    const double pos = g.periodic ? g.wrap(x) : x;
    if (!g.periodic)
        require(pos >= g.x_min && pos <= g.x_max, "project_hat: atom at " + std::to_string(x) + " lies outside the domain");
    const double s = (pos - g.x_min) / g.dx() - 0.5;
    const double fl = std::floor(s);
    const double frac = s - fl;
    const long i = static_cast<long>(fl);
    const long n = static_cast<long>(g.n_cells);
    if (g.periodic) {
        emit(g.neighbour(0, i), 1.0 - frac);
        if (frac > 0.0) emit(g.neighbour(0, i + 1), frac);
        return;
    }
    if (i < 0) { emit(0, 1.0); return; }
    if (i >= n - 1) { emit(static_cast<std::size_t>(n - 1), 1.0); return; }
    emit(static_cast<std::size_t>(i), 1.0 - frac);
    if (frac > 0.0) emit(static_cast<std::size_t>(i + 1), frac);
}

// <f, psi_i> for every cell i. Hat halves are integrated separately so the
// kink at the centre never sits inside a Simpson panel.
inline std::vector<double> hat_pairings(const std::function<double(double)>& f, const Grid1D& g)
{
    const std::size_t n = g.n_cells;
    const double dx = g.dx();
    std::vector<double> out(n, 0.0);
    auto value = [&](double x) { return f(g.wrap(x)); };
    for (std::size_t i = 0; i < n; ++i) {
        const double c = g.center(i);
        // left half: weight rises from 0 at c - dx to 1 at c
        const double lo = c - dx;
        double left = 0.0, right = 0.0;
        // each half is split again at the cell interface so that data with
        // jumps on interfaces stay piecewise smooth inside every panel
        auto rising = [&](double x) { return value(x) * (x - lo) / dx; };
        if (g.periodic || i > 0) {
            left = quad::integrate(rising, lo, c - 0.5 * dx) + quad::integrate(rising, c - 0.5 * dx, c);
        } else {
            left = quad::integrate(value, g.x_min, c);
        }
        const double hi = c + dx;
        auto falling = [&](double x) { return value(x) * (hi - x) / dx; };
        if (g.periodic || i + 1 < n) {
            right = quad::integrate(falling, c, c + 0.5 * dx) + quad::integrate(falling, c + 0.5 * dx, hi);
        } else {
            right = quad::integrate(value, c, g.x_max);
        }
        out[i] = left + right;
    }
    return out;
}

inline std::vector<double> cell_integrals(const std::function<double(double)>& f, const Grid1D& g)
{
    std::vector<double> out(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) out[i] = quad::integrate(f, g.left_edge(i), g.left_edge(i) + g.dx());
    return out;
}

} // namespace detail

/// Pairing of the initial measure with the hat basis: masses_i = <mu_0, psi_i>.
inline Measure1D project_hat(const InitialDatum& datum, const Grid1D& grid)
{
    validate(grid);
    Measure1D m{grid, std::vector<double>(grid.n_cells, 0.0)};
    for (const auto& a : datum.atoms) {
        require(std::isfinite(a.mass) && a.mass >= 0.0, "project_hat: atom mass must be finite and nonnegative");
        detail::split_atom(grid, a.location, [&](std::size_t i, double w) { m.masses[i] += w * a.mass; });
    }
    if (datum.density) {
        const auto part = detail::hat_pairings(datum.density, grid);
        for (std::size_t i = 0; i < part.size(); ++i) m.masses[i] += std::max(0.0, part[i]);
    }
    return m;
}

inline Density1D cell_averages(const std::function<double(double)>& density, const Grid1D& grid)
{
    validate(grid);
    Density1D d{grid, detail::cell_integrals(density, grid)};
    for (double& v : d.values) v /= grid.dx();
    return d;
}

/// Density-mode projection of a datum: cell averages of the density plus
/// atoms deposited whole into the cell that contains them.
inline Measure1D project_cells(const InitialDatum& datum, const Grid1D& grid)
{
    validate(grid);
    Measure1D m{grid, std::vector<double>(grid.n_cells, 0.0)};
    if (datum.density) m.masses = detail::cell_integrals(datum.density, grid);
    for (const auto& a : datum.atoms) {
        const double x = grid.wrap(a.location);
        require(x >= grid.x_min && x <= grid.x_max, "project_cells: atom lies outside the domain");
        auto i = static_cast<std::size_t>(std::floor((x - grid.x_min) / grid.dx()));
        m.masses[std::min(i, grid.n_cells - 1)] += a.mass;
    }
    return m;
}

inline Measure2D project_hat(const InitialDatum2D& datum, const Grid2D& grid)
{
    validate(grid);
    Measure2D m{grid, std::vector<double>(grid.size(), 0.0)};
    for (const auto& a : datum.atoms) {
        detail::split_atom(grid.theta, a.theta, [&](std::size_t i, double wi) {
            detail::split_atom(grid.omega, a.omega, [&](std::size_t j, double wj) {
                m.masses[grid.index(i, j)] += wi * wj * a.mass;
            });
        });
    }
    if (datum.separable()) {
        const auto px = detail::hat_pairings(datum.theta_factor, grid.theta);
        const auto py = detail::hat_pairings(datum.omega_factor, grid.omega);
        for (std::size_t i = 0; i < grid.nx(); ++i)
            for (std::size_t j = 0; j < grid.ny(); ++j) m.masses[grid.index(i, j)] += std::max(0.0, px[i] * py[j]);
    } else if (datum.density) {
        const double dx = grid.dx(), dy = grid.dy();
        auto hat = [](const Grid1D& g, std::size_t i, double x) {
            const double r = std::abs(x - g.center(i)) / g.dx();
            const bool edge_lo = !g.periodic && i == 0 && x < g.center(i);
            const bool edge_hi = !g.periodic && i + 1 == g.n_cells && x > g.center(i);
            return (edge_lo || edge_hi) ? 1.0 : std::max(0.0, 1.0 - r);
        };
        for (std::size_t i = 0; i < grid.nx(); ++i)
            for (std::size_t j = 0; j < grid.ny(); ++j) {
                double s = 0.0;
                const double cx = grid.theta.center(i), cy = grid.omega.center(j);
                for (int qx = -1; qx <= 0; ++qx)
                    for (int qy = -1; qy <= 0; ++qy) {
                        double ax = cx + qx * dx, bx = ax + dx, ay = cy + qy * dy, by = ay + dy;
                        if (!grid.theta.periodic) { ax = std::max(ax, grid.theta.x_min); bx = std::min(bx, grid.theta.x_max); }
                        if (!grid.omega.periodic) { ay = std::max(ay, grid.omega.x_min); by = std::min(by, grid.omega.x_max); }
                        s += quad::integrate_2d(
                            [&](double x, double y) {
                                return datum.density(grid.theta.wrap(x), grid.omega.wrap(y)) * hat(grid.theta, i, x) *
                                       hat(grid.omega, j, y);
                            },
                            ax, bx, ay, by);
                    }
                m.masses[grid.index(i, j)] += std::max(0.0, s);
            }
    }
    return m;
}

inline Density2D cell_averages(const std::function<double(double, double)>& density, const Grid2D& grid)
{
    validate(grid);
    Density2D d{grid, std::vector<double>(grid.size())};
    const double vol = grid.cell_volume();
    for (std::size_t i = 0; i < grid.nx(); ++i)
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            const double ax = grid.theta.left_edge(i), ay = grid.omega.left_edge(j);
            d.values[grid.index(i, j)] = quad::integrate_2d(density, ax, ax + grid.dx(), ay, ay + grid.dy()) / vol;
        }
    return d;
}

inline Measure2D project_cells(const InitialDatum2D& datum, const Grid2D& grid)
{
    validate(grid);
    Measure2D m{grid, std::vector<double>(grid.size(), 0.0)};
    if (datum.separable()) {
        const auto px = detail::cell_integrals(datum.theta_factor, grid.theta);
        const auto py = detail::cell_integrals(datum.omega_factor, grid.omega);
        for (std::size_t i = 0; i < grid.nx(); ++i)
            for (std::size_t j = 0; j < grid.ny(); ++j) m.masses[grid.index(i, j)] = std::max(0.0, px[i] * py[j]);
    } else if (datum.density) {
        m = to_measure(cell_averages(datum.density, grid));
    }
    auto locate = [](const Grid1D& g, double x) {
        const double w = g.wrap(x);
        require(w >= g.x_min && w <= g.x_max, "project_cells: atom lies outside the domain");
        return std::min(static_cast<std::size_t>(std::floor((w - g.x_min) / g.dx())), g.n_cells - 1);
    };
    for (const auto& a : datum.atoms) m.masses[grid.index(locate(grid.theta, a.theta), locate(grid.omega, a.omega))] += a.mass;
    return m;
}

} // namespace nlfv
