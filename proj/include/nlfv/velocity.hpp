#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"

namespace nlfv {

/// Constants of the standing assumptions on V: sup bound (c1), spatial
/// Lipschitz constant (c2), Lipschitz dependence on the measure in W1 (c3)
/// and Lipschitz bound of the gradient (c4).
struct VelocityBounds {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};

inline void validate(const VelocityBounds& b)
{
    for (double c : {b.c1, b.c2, b.c3, b.c4}) require(std::isfinite(c) && c >= 0.0, "velocity bounds must be finite and nonnegative");
    require(b.c1 > 0.0, "velocity bounds: c1 must be positive");
}

/// Identical oscillators: V[mu](theta) = -K int sin(theta - theta*) dmu(theta*).
struct KuramotoIdentical {
    double k = 1.0;

    VelocityBounds bounds() const { return {k, k, k, k}; }
};

/// Kinetic Kuramoto on T x R: V1 = Omega - K int sin(theta - theta*) dmu, V2 = 0.
struct KuramotoNonIdentical {
    double k = 1.0;
    double omega_min = 0.0;
    double omega_max = 1.0;

    VelocityBounds bounds() const
    {
        const double w = std::max(std::abs(omega_min), std::abs(omega_max));
        return {k + w, 1.0 + k, k, k};
    }
    // The field is evaluated on the whole Omega grid, so the sup bound that
    // matters for a run is taken over the grid's Omega range.
    VelocityBounds bounds_on(const Grid2D& g) const
    {
        auto b = bounds();
        b.c1 = k + std::max({std::abs(omega_min), std::abs(omega_max), std::abs(g.omega.x_min), std::abs(g.omega.x_max)});
        return b;
    }
};

/// Convolution field V[mu](x) = sum_j W(x - x_j) mu_j with user-declared bounds.
struct KernelField {
    std::function<double(double)> kernel;
    VelocityBounds declared;

    VelocityBounds bounds() const { return declared; }
};

namespace detail {
struct OrderParameter {
    double c = 0.0; // sum cos(x_j) m_j
    double s = 0.0; // sum sin(x_j) m_j
};

inline OrderParameter order_parameter(const Grid1D& g, std::span<const double> masses)
{
    OrderParameter op;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double x = g.center(i);
        op.c += std::cos(x) * masses[i];
        op.s += std::sin(x) * masses[i];
    }
    return op;
}
} // namespace detail

// V_i = -K sum_j sin(x_i - x_j) m_j = -K (sin x_i C - cos x_i S)
inline std::vector<double> eval_velocity_1d(const KuramotoIdentical& f, const Measure1D& m)
{
    const auto op = detail::order_parameter(m.grid, m.masses);
    std::vector<double> v(m.masses.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = m.grid.center(i);
        v[i] = -f.k * (std::sin(x) * op.c - std::cos(x) * op.s);
    }
    return v;
}

inline std::vector<double> eval_velocity_1d(const KernelField& f, const Measure1D& m)
{
    require(static_cast<bool>(f.kernel), "KernelField: kernel is not set");
    const std::size_t n = m.masses.size();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = m.grid.center(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (m.masses[j] != 0.0) s += f.kernel(x - m.grid.center(j)) * m.masses[j];
        v[i] = s;
    }
    return v;
}

struct Velocity2D {
    std::vector<double> v1;
    std::vector<double> v2;
};

// V1 only; V2 vanishes identically.
inline void eval_velocity_2d_v1_into(const KuramotoNonIdentical& f, const Measure2D& m, std::vector<double>& v1)
{
    const auto& g = m.grid;
    const std::size_t nx = g.nx(), ny = g.ny();
    double c = 0.0, s = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < ny; ++j) row += m.masses[g.index(i, j)];
        const double x = g.theta.center(i);
        c += std::cos(x) * row;
        s += std::sin(x) * row;
    }
    v1.resize(g.size());
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = g.theta.center(i);
        const double coupling = -f.k * (std::sin(x) * c - std::cos(x) * s);
        double* out = v1.data() + g.index(i, 0);
        for (std::size_t j = 0; j < ny; ++j) out[j] = g.omega.center(j) + coupling;
    }
}

inline Velocity2D eval_velocity_2d(const KuramotoNonIdentical& f, const Measure2D& m)
{
    Velocity2D out{{}, std::vector<double>(m.grid.size(), 0.0)};
    eval_velocity_2d_v1_into(f, m, out.v1);
    return out;
}

struct BoundsReport {
    bool passed = true;
    double worst_c1_ratio = 0.0; // max |V| / c1
    double worst_c2_ratio = 0.0; // max difference quotient / c2
    std::vector<std::string> violations;
};

namespace detail {
inline void finish(BoundsReport& r, const VelocityBounds& b)
{
    constexpr double eps = 1e-6;
    if (r.worst_c1_ratio > 1.0 + eps) {
        r.passed = false;
        r.violations.push_back("c1 (sup bound) exceeded: max|V|/c1 = " + std::to_string(r.worst_c1_ratio));
    }
    if (b.c2 > 0.0 && r.worst_c2_ratio > 1.0 + eps) {
        r.passed = false;
        r.violations.push_back("c2 (Lipschitz bound) exceeded: max slope/c2 = " + std::to_string(r.worst_c2_ratio));
    }
}
} // namespace detail

/// Spot-checks declared bounds on sample measures: max|V_i| <= c1 and
/// |V_{i+1} - V_i| / dx <= c2, each with relative slack 1e-6.
template <class Field>
BoundsReport check_bounds(const Field& field, const std::vector<Measure1D>& samples, const VelocityBounds& b)
{
    BoundsReport r;
    for (const auto& m : samples) {
        const auto v = eval_velocity_1d(field, m);
        const double dx = m.grid.dx();
        for (std::size_t i = 0; i < v.size(); ++i) {
            r.worst_c1_ratio = std::max(r.worst_c1_ratio, std::abs(v[i]) / b.c1);
            const std::size_t nb = m.grid.neighbour(i, 1);
            if (nb < v.size() && b.c2 > 0.0) r.worst_c2_ratio = std::max(r.worst_c2_ratio, std::abs(v[nb] - v[i]) / dx / b.c2);
        }
    }
    detail::finish(r, b);
    return r;
}

template <class Field>
BoundsReport check_bounds(const Field& field, const std::vector<Measure1D>& samples)
{
    return check_bounds(field, samples, field.bounds());
}

/// 2D variant: difference quotients are taken along theta and Omega
/// separately and the larger is reported against c2.
inline BoundsReport check_bounds(const KuramotoNonIdentical& field, const std::vector<Measure2D>& samples,
                                 const VelocityBounds& b)
{
    BoundsReport r;
    for (const auto& m : samples) {
        const auto v = eval_velocity_2d(field, m).v1;
        const auto& g = m.grid;
        for (std::size_t i = 0; i < g.nx(); ++i)
            for (std::size_t j = 0; j < g.ny(); ++j) {
                const double here = v[g.index(i, j)];
                r.worst_c1_ratio = std::max(r.worst_c1_ratio, std::abs(here) / b.c1);
                if (b.c2 <= 0.0) continue;
                const std::size_t ni = g.theta.neighbour(i, 1);
                if (ni < g.nx()) r.worst_c2_ratio = std::max(r.worst_c2_ratio, std::abs(v[g.index(ni, j)] - here) / g.dx() / b.c2);
                const std::size_t nj = g.omega.neighbour(j, 1);
                if (nj < g.ny()) r.worst_c2_ratio = std::max(r.worst_c2_ratio, std::abs(v[g.index(i, nj)] - here) / g.dy() / b.c2);
            }
    }
    detail::finish(r, b);
    return r;
}

inline BoundsReport check_bounds(const KuramotoNonIdentical& field, const std::vector<Measure2D>& samples)
{
    return check_bounds(field, samples, field.bounds());
}

} // namespace nlfv
