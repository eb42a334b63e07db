#pragma once

// 1-Wasserstein distances between measures in one dimension.
//
// Both operands are reduced to "pieces": point masses and uniformly spread
// cell masses. The difference of the two CDFs is then piecewise linear
// between the merged breakpoints and its absolute value integrates exactly.
// On the torus the distance is min_s int |F_a - F_b - s|, attained at a
// median of F_a - F_b under arc-length measure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"

namespace nlfv {

/// A point mass (lo == hi) or a mass spread uniformly over [lo, hi).
struct MassPiece {
    double lo = 0.0;
    double hi = 0.0;
    double mass = 0.0;
};

inline std::vector<MassPiece> pieces_of(const Measure1D& m)
{
    std::vector<MassPiece> out;
    out.reserve(m.masses.size());
    for (std::size_t i = 0; i < m.masses.size(); ++i)
        if (m.masses[i] != 0.0) out.push_back({m.grid.center(i), m.grid.center(i), m.masses[i]});
    return out;
}

inline std::vector<MassPiece> pieces_of(const Density1D& d)
{
    std::vector<MassPiece> out;
    out.reserve(d.values.size());
    const double dx = d.grid.dx();
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (d.values[i] != 0.0) out.push_back({d.grid.left_edge(i), d.grid.left_edge(i) + dx, d.values[i] * dx});
    return out;
}

namespace detail {

inline double total(const std::vector<MassPiece>& p)
{
    double s = 0.0;
    for (const auto& q : p) s += q.mass;
    return s;
}

inline void check_masses(double ma, double mb)
{
    const double tol = 1e-9 * std::max(1.0, std::max(std::abs(ma), std::abs(mb)));
    require(std::abs(ma - mb) <= tol,
            "wasserstein: total masses differ (" + std::to_string(ma) + " vs " + std::to_string(mb) + ")");
}

// Wrap pieces onto [origin, origin + 2 pi), cutting spread pieces that
// straddle the seam.
inline std::vector<MassPiece> wrap_pieces(const std::vector<MassPiece>& in, double origin)
{
    const Grid1D circle = Grid1D::torus(1, origin);
    const double end = origin + two_pi;
    std::vector<MassPiece> out;
    out.reserve(in.size() + 2);
    for (const auto& p : in) {
        if (p.lo == p.hi) {
            const double x = circle.wrap(p.lo);
            out.push_back({x, x, p.mass});
            continue;
        }
        const double width = p.hi - p.lo;
        require(width <= two_pi + 1e-12, "wasserstein: spread piece wider than the torus");
        double lo = circle.wrap(p.lo);
        double hi = lo + width;
        if (hi <= end) {
            out.push_back({lo, hi, p.mass});
        } else {
            const double first = (end - lo) / width;
            out.push_back({lo, end, p.mass * first});
            out.push_back({origin, origin + (hi - end), p.mass * (1.0 - first)});
        }
    }
    return out;
}

// One linear run of D = F_a - F_b: D0 at the left end, D1 at the right end.
struct Run {
    double length;
    double d0;
    double d1;
};

// Builds the runs of F_a - F_b over [from, to]. Pieces of b enter with
// negative sign. Jumps at a common location are summed before being applied
// so identical atoms cancel exactly.
inline std::vector<Run> cdf_difference(const std::vector<MassPiece>& a, const std::vector<MassPiece>& b,
                                       double from, double to)
{
    struct Event {
        double x;
        double jump_pos;
        double jump_neg;
        double slope;
    };
    std::vector<Event> ev;
    ev.reserve(2 * (a.size() + b.size()) + 2);
    auto add = [&](const std::vector<MassPiece>& ps, double sign) {
        for (const auto& p : ps) {
            if (p.lo == p.hi) {
                if (sign > 0) ev.push_back({p.lo, p.mass, 0.0, 0.0});
                else ev.push_back({p.lo, 0.0, p.mass, 0.0});
            } else {
                const double rate = sign * p.mass / (p.hi - p.lo);
                ev.push_back({p.lo, 0.0, 0.0, rate});
                ev.push_back({p.hi, 0.0, 0.0, -rate});
            }
        }
    };
    add(a, 1.0);
    add(b, -1.0);
    ev.push_back({from, 0.0, 0.0, 0.0});
    ev.push_back({to, 0.0, 0.0, 0.0});
    std::sort(ev.begin(), ev.end(), [](const Event& l, const Event& r) { return l.x < r.x; });

    std::vector<Run> runs;
    runs.reserve(ev.size());
    double d = 0.0, slope = 0.0;
    std::size_t k = 0;
    while (k < ev.size()) {
        const double x = ev[k].x;
        double jp = 0.0, jn = 0.0, ds = 0.0;
        for (; k < ev.size() && ev[k].x == x; ++k) {
            jp += ev[k].jump_pos;
            jn += ev[k].jump_neg;
            ds += ev[k].slope;
        }
        d += jp - jn;
        slope += ds;
        if (k == ev.size()) break;
        const double len = ev[k].x - x;
        const double d_end = d + slope * len;
        if (x >= from && ev[k].x <= to && len > 0.0) runs.push_back({len, d, d_end});
        d = d_end;
    }
    return runs;
}

// int_0^L |d0 + (d1 - d0) u / L| du, exactly.
inline double abs_linear_integral(double len, double d0, double d1)
{
    if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) return 0.5 * len * (std::abs(d0) + std::abs(d1));
    return 0.5 * len * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
}

// Median of D under arc length: smallest s with |{D <= s}| >= half the
// total length. Each run contributes a step (constant D) or a ramp.
inline double arc_length_median(const std::vector<Run>& runs)
{
    struct Ev {
        double v;
        double step;
        double slope;
    };
    std::vector<Ev> ev;
    ev.reserve(2 * runs.size());
    double total_len = 0.0;
    for (const auto& r : runs) {
        total_len += r.length;
        const double lo = std::min(r.d0, r.d1), hi = std::max(r.d0, r.d1);
        if (hi == lo) {
            ev.push_back({lo, r.length, 0.0});
        } else {
            const double rate = r.length / (hi - lo);
            ev.push_back({lo, 0.0, rate});
            ev.push_back({hi, 0.0, -rate});
        }
    }
    if (ev.empty()) return 0.0;
    std::sort(ev.begin(), ev.end(), [](const Ev& l, const Ev& r) { return l.v < r.v; });
    const double half = 0.5 * total_len;
    double measure = 0.0, slope = 0.0, v_prev = ev.front().v;
    for (std::size_t k = 0; k < ev.size();) {
        const double v = ev[k].v;
        const double at_v = measure + slope * (v - v_prev);
        if (at_v >= half && slope > 0.0) return v_prev + (half - measure) / slope;
        measure = at_v;
        v_prev = v;
        for (; k < ev.size() && ev[k].v == v; ++k) {
            measure += ev[k].step;
            slope += ev[k].slope;
        }
        if (measure >= half) return v;
    }
    return v_prev;
}

inline double w1_line_pieces(const std::vector<MassPiece>& a, const std::vector<MassPiece>& b)
{
    check_masses(total(a), total(b));
    if (a.empty() && b.empty()) return 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* ps : {&a, &b})
        for (const auto& p : *ps) {
            lo = std::min(lo, p.lo);
            hi = std::max(hi, p.hi);
        }
    double s = 0.0;
    for (const auto& r : cdf_difference(a, b, lo, hi)) s += abs_linear_integral(r.length, r.d0, r.d1);
    return s;
}

inline double w1_torus_pieces(const std::vector<MassPiece>& a, const std::vector<MassPiece>& b, double origin)
{
    check_masses(total(a), total(b));
    const auto wa = wrap_pieces(a, origin);
    const auto wb = wrap_pieces(b, origin);
    const auto runs = cdf_difference(wa, wb, origin, origin + two_pi);
    const double shift = arc_length_median(runs);
    double s = 0.0;
    for (const auto& r : runs) s += abs_linear_integral(r.length, r.d0 - shift, r.d1 - shift);
    return s;
}

template <class M>
const Grid1D& grid_of(const M& m) { return m.grid; }

} // namespace detail

/// W1 on the real line: the L1 norm of the CDF difference. Operands may
/// be atomic or piecewise-constant and may use different grids.
template <class A, class B>
double wasserstein1_line(const A& a, const B& b)
{
    require(!detail::grid_of(a).periodic && !detail::grid_of(b).periodic,
            "wasserstein1_line: both operands must live on a non-periodic domain");
    return detail::w1_line_pieces(pieces_of(a), pieces_of(b));
}

/// W1 on the torus R / 2 pi Z with geodesic cost.
template <class A, class B>
double wasserstein1_torus(const A& a, const B& b)
{
    require(detail::grid_of(a).periodic && detail::grid_of(b).periodic,
            "wasserstein1_torus: both operands must live on the torus");
    return detail::w1_torus_pieces(pieces_of(a), pieces_of(b), detail::grid_of(a).x_min);
}

/// Dispatches on the periodicity of the first operand's grid.
template <class A, class B>
double wasserstein1(const A& a, const B& b)
{
    return detail::grid_of(a).periodic ? wasserstein1_torus(a, b) : wasserstein1_line(a, b);
}

inline double wasserstein1_line(const std::vector<Atom>& a, const std::vector<Atom>& b)
{
    std::vector<MassPiece> pa, pb;
    for (const auto& x : a) pa.push_back({x.location, x.location, x.mass});
    for (const auto& x : b) pb.push_back({x.location, x.location, x.mass});
    return detail::w1_line_pieces(pa, pb);
}

inline double wasserstein1_torus(const std::vector<Atom>& a, const std::vector<Atom>& b, double origin = 0.0)
{
    std::vector<MassPiece> pa, pb;
    for (const auto& x : a) pa.push_back({x.location, x.location, x.mass});
    for (const auto& x : b) pb.push_back({x.location, x.location, x.mass});
    return detail::w1_torus_pieces(pa, pb, origin);
}

} // namespace nlfv
