#pragma once

// Particle solutions: for atomic initial data the measure-valued solution
// is a sum of moving point masses whose positions solve an ODE system.
// Used as an exact-solution oracle for the finite volume schemes.

#include <cmath>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"
#include "nlfv/velocity.hpp"
#include "nlfv/wasserstein.hpp"

namespace nlfv {

/// Point masses on the torus. Positions are kept unwrapped while integrating.
struct ParticleSystem {
    std::vector<double> positions;
    std::vector<double> masses;

    std::vector<double> wrapped_positions() const
    {
        const Grid1D circle = Grid1D::torus(1);
        std::vector<double> out(positions.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = circle.wrap(positions[i]);
        return out;
    }

    std::vector<Atom> atoms() const
    {
        std::vector<Atom> out;
        const auto x = wrapped_positions();
        for (std::size_t i = 0; i < x.size(); ++i) out.push_back({x[i], masses[i]});
        return out;
    }
};

inline void validate(const ParticleSystem& ps)
{
    require(ps.positions.size() == ps.masses.size(), "particle system: positions and masses differ in length");
    for (double m : ps.masses) require(std::isfinite(m) && m > 0.0, "particle system: masses must be positive");
    for (double x : ps.positions) require(std::isfinite(x), "particle system: positions must be finite");
}

inline std::vector<double> particle_rhs(const ParticleSystem& ps, const KuramotoIdentical& f)
{
    double c = 0.0, s = 0.0;
    for (std::size_t j = 0; j < ps.positions.size(); ++j) {
        c += std::cos(ps.positions[j]) * ps.masses[j];
        s += std::sin(ps.positions[j]) * ps.masses[j];
    }
    std::vector<double> v(ps.positions.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = ps.positions[i];
        v[i] = -f.k * (std::sin(x) * c - std::cos(x) * s);
    }
    return v;
}

inline std::vector<double> particle_rhs(const ParticleSystem& ps, const KernelField& f)
{
    std::vector<double> v(ps.positions.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) v[i] += f.kernel(ps.positions[i] - ps.positions[j]) * ps.masses[j];
    return v;
}

/// Classical RK4 with the last step clamped onto t_final. dt must respect
/// the stability margin dt <= 0.1 / c2 of the field.
template <class Field>
ParticleSystem rk4_run(ParticleSystem ps, const Field& field, double t_final, double dt)
{
    validate(ps);
    require(dt > 0.0 && t_final >= 0.0, "rk4_run: dt must be positive and t_final nonnegative");
    const double c2 = field.bounds().c2;
    if (c2 > 0.0) require(dt <= 0.1 / c2 * (1.0 + 1e-12), "rk4_run: dt exceeds the stability margin 0.1 / c2");

    const std::size_t n = ps.positions.size();
    auto shifted = [&](const std::vector<double>& base, const std::vector<double>& k, double h) {
        ParticleSystem q{base, ps.masses};
        for (std::size_t i = 0; i < n; ++i) q.positions[i] += h * k[i];
        return q;
    };
    double t = 0.0;
    while (t < t_final) {
        double h = dt;
        bool last = false;
        if (t + h >= t_final * (1.0 - 1e-14)) {
            h = t_final - t;
            last = true;
        }
        const auto& x = ps.positions;
        const auto k1 = particle_rhs(ps, field);
        const auto k2 = particle_rhs(shifted(x, k1, 0.5 * h), field);
        const auto k3 = particle_rhs(shifted(x, k2, 0.5 * h), field);
        const auto k4 = particle_rhs(shifted(x, k3, h), field);
        for (std::size_t i = 0; i < n; ++i) ps.positions[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = last ? t_final : t + h;
    }
    return ps;
}

/// W1 between the particle empirical measure and a grid measure.
inline double compare_to_grid(const ParticleSystem& ps, const Measure1D& grid_solution)
{
    validate(ps);
    std::vector<MassPiece> a;
    for (const auto& at : ps.atoms()) a.push_back({at.location, at.location, at.mass});
    const auto b = pieces_of(grid_solution);
    if (grid_solution.grid.periodic) return detail::w1_torus_pieces(a, b, grid_solution.grid.x_min);
    return detail::w1_line_pieces(a, b);
}

/// Kinetic Kuramoto particles on T x R. Natural frequencies are constant
/// in time, so only the phases move.
struct ParticleSystem2D {
    std::vector<double> theta;
    std::vector<double> omega;
    std::vector<double> masses;
};

inline std::vector<double> particle_rhs(const ParticleSystem2D& ps, const KuramotoNonIdentical& f)
{
    double c = 0.0, s = 0.0;
    for (std::size_t j = 0; j < ps.theta.size(); ++j) {
        c += std::cos(ps.theta[j]) * ps.masses[j];
        s += std::sin(ps.theta[j]) * ps.masses[j];
    }
    std::vector<double> v(ps.theta.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = ps.omega[i] - f.k * (std::sin(ps.theta[i]) * c - std::cos(ps.theta[i]) * s);
    return v;
}

inline ParticleSystem2D rk4_run(ParticleSystem2D ps, const KuramotoNonIdentical& field, double t_final, double dt)
{
    require(ps.theta.size() == ps.omega.size() && ps.theta.size() == ps.masses.size(),
            "particle system: component arrays differ in length");
    require(dt > 0.0 && dt <= 0.1 / field.bounds().c2 * (1.0 + 1e-12), "rk4_run: dt exceeds the stability margin 0.1 / c2");
    const std::size_t n = ps.theta.size();
    auto shifted = [&](const std::vector<double>& k, double h) {
        ParticleSystem2D q = ps;
        for (std::size_t i = 0; i < n; ++i) q.theta[i] += h * k[i];
        return q;
    };
    double t = 0.0;
    while (t < t_final) {
        double h = dt;
        bool last = false;
        if (t + h >= t_final * (1.0 - 1e-14)) {
            h = t_final - t;
            last = true;
        }
        const auto k1 = particle_rhs(ps, field);
        const auto k2 = particle_rhs(shifted(k1, 0.5 * h), field);
        const auto k3 = particle_rhs(shifted(k2, 0.5 * h), field);
        const auto k4 = particle_rhs(shifted(k3, h), field);
        for (std::size_t i = 0; i < n; ++i) ps.theta[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = last ? t_final : t + h;
    }
    return ps;
}

} // namespace nlfv
