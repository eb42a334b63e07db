#pragma once

// Randomized invariant suite run by `nlfv check`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"
#include "nlfv/particles.hpp"
#include "nlfv/scheme.hpp"
#include "nlfv/transport_oracle.hpp"
#include "nlfv/velocity.hpp"
#include "nlfv/wasserstein.hpp"

namespace nlfv {

struct InvariantResult {
    InvariantResult() = default;
    explicit InvariantResult(std::string n) : name(std::move(n)) {}

    std::string name;
    bool passed = true;
    double worst = 0.0; // worst observed value of the checked quantity
    std::string detail;
};

struct CheckReport {
    std::vector<InvariantResult> results;

    bool passed() const
    {
        return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    }
};

struct CheckOptions {
    std::uint64_t seed = 20240601;
    std::size_t random_steps = 1000;
    std::size_t transport_pairs = 500;
    std::size_t velocity_samples = 100;
    bool particles = true;
    // fault injection
    std::optional<double> inject_cfl;
    bool inject_negative_mass = false;
};

namespace detail {

inline std::vector<double> random_masses(std::mt19937_64& rng, std::size_t n, std::size_t first, std::size_t last)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> m(n, 0.0);
    double total = 0.0;
    for (std::size_t i = first; i <= last; ++i) total += m[i] = u(rng) < 0.15 ? 0.0 : u(rng);
    if (total == 0.0) total = m[first] = 1.0;
    for (double& x : m) x /= total;
    return m;
}

inline std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

struct Tracker {
    InvariantResult r;
    void worse(double value) { r.worst = std::max(r.worst, value); }
    void fail(const std::string& why)
    {
        if (r.passed) r.detail = why;
        r.passed = false;
    }
};

inline Tracker track(std::string name) { return Tracker{InvariantResult{std::move(name)}}; }

} // namespace detail

/// Steps random probability measures with random admissible time steps
/// through all 1D variants and checks the per-step stability properties.
inline std::vector<InvariantResult> check_step_invariants(const CheckOptions& opt)
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    using detail::track;
    auto positivity = track("positivity"), conservation = track("mass_conservation"), support = track("support_growth"),
         w1step = track("w1_step_increment"), tv = track("tv_recursion"), l1cont = track("l1_time_continuity"),
         cfl = track("cfl_guard");

    std::size_t done = 0;
    const std::size_t per_run = 50;
    for (std::size_t run = 0; done < opt.random_steps; ++run) {
        const Variant variant = run % 3 == 2 ? Variant::staggered1d : Variant::unstaggered1d;
        const bool periodic = run % 4 != 3;
        const std::size_t n = 16 + static_cast<std::size_t>(u(rng) * 113);
        const Grid1D grid = periodic ? Grid1D::torus(n) : Grid1D::line(n, -3.0, 3.0);
        const KuramotoIdentical field{0.25 + 1.75 * u(rng)};
        const VelocityBounds b = field.bounds();

        // compact random support in the middle third so the window can grow
        Measure1D m{grid, detail::random_masses(rng, n, n / 3, n / 3 + std::max<std::size_t>(1, n / 6))};
        if (opt.inject_negative_mass && run == 0) m.masses[n / 3] = -1e-3;
        const double cfl_max = cfl_limit(variant);

        for (std::size_t k = 0; k < per_run && done < opt.random_steps; ++k, ++done) {
            const auto v = eval_velocity_1d(field, m);
            const double vmax = max_abs(v);
            const double courant = opt.inject_cfl ? *opt.inject_cfl : cfl_max * (0.05 + 0.95 * u(rng));
            const double dt = courant * grid.dx() / std::max({b.c1, vmax, 1e-300});
            Measure1D next;
            try {
                if (variant == Variant::staggered1d)
                    next = lxf_step_staggered_1d(m, v, dt, k % 2 == 0 ? Stagger::forward : Stagger::backward);
                else
                    next = lxf_step_unstaggered_1d(m, v, dt);
            } catch (const CflViolation& e) {
                cfl.fail(std::string("CFL guard rejected a step: ") + e.what());
                break;
            }

            const double mn = min_value(next.masses);
            positivity.worse(std::max(0.0, -mn));
            if (!(mn >= 0.0)) positivity.fail("negative mass " + detail::fmt(mn) + " at step " + std::to_string(done));

            const double m0 = mass(m), m1 = mass(next);
            if (periodic) {
                const double rel = std::abs(m1 - m0) / std::max(std::abs(m0), 1e-300);
                conservation.worse(rel);
                if (rel > 1e-12) conservation.fail("relative mass change " + detail::fmt(rel));
            }

            const auto w_old = support_bounds(m), w_new = support_bounds(next);
            if (w_old && w_new) {
                const bool edge = w_old->first == 0 || w_old->last + 1 == n;
                if (!edge) {
                    const long grow = std::max(static_cast<long>(w_old->first) - static_cast<long>(w_new->first),
                                               static_cast<long>(w_new->last) - static_cast<long>(w_old->last));
                    support.worse(static_cast<double>(grow));
                    if (grow > 1) support.fail("support window grew by " + std::to_string(grow) + " cells");
                }
            }

            if (std::abs(m1 - m0) <= 1e-9 * std::max(1.0, m0) && mn >= 0.0) {
                const double w = wasserstein1(m, next);
                const double ratio = w / grid.dx();
                w1step.worse(ratio);
                if (w > grid.dx() * (1.0 + 1e-9)) w1step.fail("W1 step increment " + detail::fmt(ratio) + " dx");
            }

            if (variant == Variant::unstaggered1d && periodic) {
                const auto d0 = to_density(m), d1 = to_density(next);
                const double tv0 = total_variation(d0), tv1 = total_variation(d1);
                const double tv_bound = (1.0 + b.c2 * dt) * tv0 + 0.5 * b.c4 * dt + 1e-9;
                tv.worse(tv1 - tv_bound);
                if (tv1 > tv_bound) tv.fail("TV " + detail::fmt(tv1) + " exceeds recursion bound " + detail::fmt(tv_bound));
                double l1 = 0.0;
                for (std::size_t i = 0; i < n; ++i) l1 += std::abs(d1.values[i] - d0.values[i]) * grid.dx();
                const double l1_bound = grid.dx() * tv0 + b.c2 * dt + 1e-9;
                l1cont.worse(l1 - l1_bound);
                if (l1 > l1_bound) l1cont.fail("L1 step " + detail::fmt(l1) + " exceeds bound " + detail::fmt(l1_bound));
            }
            m = std::move(next);
        }
        if (!cfl.r.passed) break;
    }

    // the guard itself must reject a step at twice the admissible size
    if (!opt.inject_cfl) {
        const Measure1D m{Grid1D::torus(32), std::vector<double>(32, 1.0 / 32)};
        const std::vector<double> v(32, 1.0);
        bool thrown = false;
        try {
            (void)lxf_step_unstaggered_1d(m, v, 2.0 * m.grid.dx());
        } catch (const CflViolation&) {
            thrown = true;
        }
        if (!thrown) cfl.fail("doubled time step was not rejected");
    }

    for (auto* t : {&positivity, &conservation, &support, &w1step, &tv, &l1cont, &cfl})
        if (t->r.detail.empty()) t->r.detail = "worst " + detail::fmt(t->r.worst);
    return {positivity.r, conservation.r, support.r, w1step.r, tv.r, l1cont.r, cfl.r};
}

/// Closed-form and brute-force oracles against the fast implementations.
inline std::vector<InvariantResult> check_oracles(const CheckOptions& opt)
{
    std::mt19937_64 rng(opt.seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    using detail::track;
    auto w1line = track("w1_line_vs_lp"), w1torus = track("w1_torus_vs_lp"), vel = track("velocity_vs_naive"),
         two = track("two_particle_closed_form");

    auto atoms = [&](double lo, double hi) {
        const std::size_t k = 1 + static_cast<std::size_t>(u(rng) * 8);
        std::vector<Atom> a(k);
        double total = 0.0;
        for (auto& at : a) {
            at.location = lo + (hi - lo) * u(rng);
            total += at.mass = 0.05 + u(rng);
        }
        for (auto& at : a) at.mass /= total;
        return a;
    };
    for (std::size_t p = 0; p < opt.transport_pairs; ++p) {
        const auto a = atoms(-3.0, 3.0), b = atoms(-3.0, 3.0);
        const double e = std::abs(wasserstein1_line(a, b) - wasserstein1_lp_oracle(a, b, TransportCost::line));
        w1line.worse(e);
        if (e > 1e-9) w1line.fail("line W1 differs from LP oracle by " + detail::fmt(e));
        const auto c = atoms(0.0, two_pi), d = atoms(0.0, two_pi);
        const double f = std::abs(wasserstein1_torus(c, d) - wasserstein1_lp_oracle(c, d, TransportCost::torus));
        w1torus.worse(f);
        if (f > 1e-9) w1torus.fail("torus W1 differs from LP oracle by " + detail::fmt(f));
    }

    for (std::size_t s = 0; s < opt.velocity_samples; ++s) {
        const std::size_t n = 8 + static_cast<std::size_t>(u(rng) * 250);
        const Measure1D m{Grid1D::torus(n), detail::random_masses(rng, n, 0, n - 1)};
        const KuramotoIdentical field{0.1 + 3.0 * u(rng)};
        const auto v = eval_velocity_1d(field, m);
        for (std::size_t i = 0; i < n; ++i) {
            double naive = 0.0;
            for (std::size_t j = 0; j < n; ++j) naive += std::sin(m.grid.center(i) - m.grid.center(j)) * m.masses[j];
            const double e = std::abs(v[i] + field.k * naive);
            vel.worse(e);
            if (e > 1e-12) vel.fail("O(N) velocity differs from naive sum by " + detail::fmt(e));
        }
    }

    {
        const double s0 = 2.0, k = 1.0, t = 0.5;
        const ParticleSystem ps{{pi - s0 / 2, pi + s0 / 2}, {0.5, 0.5}};
        const auto out = rk4_run(ps, KuramotoIdentical{k}, t, 1e-3);
        const double s = out.positions[1] - out.positions[0];
        const double exact = 2.0 * std::atan(std::tan(s0 / 2) * std::exp(-k * t));
        const double e = std::abs(s - exact);
        two.worse(e);
        if (e > 1e-8) two.fail("two-particle separation off by " + detail::fmt(e));
    }

    for (auto* t : {&w1line, &w1torus, &vel, &two})
        if (t->r.detail.empty()) t->r.detail = "worst " + detail::fmt(t->r.worst);
    return {w1line.r, w1torus.r, vel.r, two.r};
}

/// Four quarter-mass atoms used for the particle cross-check.
inline ParticleSystem cross_check_particles()
{
    return {{pi / 2, 3 * pi / 4, 5 * pi / 4, 3 * pi / 2}, {0.25, 0.25, 0.25, 0.25}};
}

/// W1 between the FV solution at resolution n and the particle solution,
/// both at t_final, for identical Kuramoto with coupling k.
inline double particle_cross_error(const ParticleSystem& ps, std::size_t n, double k, double t_final)
{
    InitialDatum datum;
    datum.atoms = ps.atoms();
    SchemeConfig cfg;
    cfg.t_final = t_final;
    cfg.record_diagnostics = false;
    const KuramotoIdentical field{k};
    const auto rec = run_to_time(datum, field, cfg, Grid1D::torus(n));
    const double dt_fv = cfg.cfl_number * Grid1D::torus(n).dx() / field.bounds().c1;
    const auto exact = rk4_run(ps, field, t_final, std::min(dt_fv / 10.0, 0.1 / field.bounds().c2));
    return compare_to_grid(exact, rec.final_state);
}

/// Refinement errors of the FV scheme against the particle solution.
inline std::vector<double> particle_cross_errors(const std::vector<std::size_t>& ns, double k = 1.0, double t_final = 0.5)
{
    const auto ps = cross_check_particles();
    std::vector<double> e;
    for (std::size_t n : ns) e.push_back(particle_cross_error(ps, n, k, t_final));
    return e;
}

inline std::vector<InvariantResult> check_particles()
{
    const std::vector<std::size_t> ns{64, 128, 256, 512};
    const auto e = particle_cross_errors(ns);
    InvariantResult mono{"particle_monotone_refinement"};
    std::string seq;
    for (std::size_t i = 0; i < e.size(); ++i) {
        seq += (i ? " " : "") + detail::fmt(e[i]);
        if (i && !(e[i] < e[i - 1])) mono.passed = false;
    }
    mono.detail = "W1 at N=64..512: " + seq;
    mono.worst = e.back();
    InvariantResult ratio{"particle_refinement_128_vs_512"};
    ratio.worst = e[1] / e[3];
    ratio.passed = ratio.worst >= 2.0;
    ratio.detail = "ratio " + detail::fmt(ratio.worst) + " (needs >= 2)";
    return {mono, ratio};
}

inline CheckReport run_invariant_suite(const CheckOptions& opt = {})
{
    CheckReport rep;
    auto add = [&](std::vector<InvariantResult> rs) {
        for (auto& r : rs) rep.results.push_back(std::move(r));
    };
    add(check_step_invariants(opt));
    add(check_oracles(opt));
    if (opt.particles) add(check_particles());
    return rep;
}

} // namespace nlfv
