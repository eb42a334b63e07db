#pragma once

// Canned initial data for the Kuramoto benchmarks and the mesh-refinement
// driver that turns them into error / EOC tables.

#include <cmath>
#include <future>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"
#include "nlfv/scheme.hpp"
#include "nlfv/velocity.hpp"
#include "nlfv/wasserstein.hpp"

namespace nlfv {


enum class Metric { w1, l1 };

struct Builtin {
    std::string name;
    std::variant<InitialDatum, InitialDatum2D> datum;
    bool two_dimensional = false;
    double omega_min = 0.0; // support of the frequency distribution (2D only)
    double omega_max = 0.0;
};

inline const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> names{"parabolic1d", "piecewise_constant1d", "singular1d", "polynomial2d"};
    return names;
}

inline Builtin builtin_datum(const std::string& name)
{
    if (name == "parabolic1d") {
        InitialDatum d;
        d.density = [](double th) {
            return (th >= pi / 2 && th < 3 * pi / 2) ? 6.0 / (pi * pi * pi) * (1.5 * pi - th) * (th - 0.5 * pi) : 0.0;
        };
        return {name, d};
    }
    if (name == "piecewise_constant1d") {
        InitialDatum d;
        d.density = [](double th) { return (th >= pi / 2 && th < 3 * pi / 2) ? 2.0 / (3 * pi) : 1.0 / (3 * pi); };
        return {name, d};
    }
    if (name == "singular1d") {
        // (1/4)(delta_{3pi/4} + delta_{5pi/4}) plus mass 1/2 spread uniformly on [pi/2, 3pi/2]
        InitialDatum d;
        d.atoms = {{3 * pi / 4, 0.25}, {5 * pi / 4, 0.25}};
        d.density = [](double th) { return (th >= pi / 2 && th <= 3 * pi / 2) ? 0.5 / pi : 0.0; };
        return {name, d};
    }
    if (name == "polynomial2d") {
        InitialDatum2D d;
        d.theta_factor = [](double th) { return (th >= pi / 4 && th < pi / 2) ? 64.0 / (3 * pi * pi) * th : 0.0; };
        d.omega_factor = [](double om) { return (om >= 0.0 && om <= 1.0) ? om : 0.0; };
        d.density = [f = d.theta_factor, g = d.omega_factor](double th, double om) { return f(th) * g(om); };
        Builtin b{name, d, true, 0.0, 1.0};
        return b;
    }
    std::string valid;
    for (const auto& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidInput("unknown experiment '" + name + "'; valid names: " + valid);
}

/// Experimental order of convergence for a refinement by `factor`.
/// Returns nullopt when either error is not positive.
inline std::optional<double> eoc(double e_coarse, double e_fine, double factor = 2.0)
{
    if (!(e_coarse > 0.0) || !(e_fine > 0.0) || !std::isfinite(e_coarse) || !std::isfinite(e_fine)) return std::nullopt;
    return std::log(e_coarse / e_fine) / std::log(factor);
}

struct ExperimentSpec {
    std::string name = "parabolic1d";
    double coupling_k = 1.0;
    std::vector<std::size_t> resolutions{32, 64, 128, 256, 512};
    std::size_t reference_n = 4096;
    double t_final = 0.5;
    double cfl_number = 0.4;
    std::vector<Metric> metrics{Metric::w1, Metric::l1};
    Variant variant = Variant::unstaggered1d;
    Mode mode = Mode::measure;
    StepPolicy step_policy = StepPolicy::adaptive;
    // Omega extent of 2D grids; N counts cells along each axis.
    double omega_lo = -0.5;
    double omega_hi = 1.5;
    double boundary_defect_tol = 1e-8;
    bool concurrent = false;
};

struct ErrorRow {
    std::size_t n = 0;
    std::optional<double> err_w1, eoc_w1, err_l1, eoc_l1;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;
    bool complete = true;
    std::string failure; // first solver failure when incomplete
};

inline bool has_metric(const ExperimentSpec& s, Metric m)
{
    return std::find(s.metrics.begin(), s.metrics.end(), m) != s.metrics.end();
}

inline void validate(const ExperimentSpec& s)
{
    require(s.t_final > 0.0, "experiment: t_final must be positive");
    require(!s.resolutions.empty(), "experiment: no resolutions given");
    require(s.reference_n > 0, "experiment: reference_n must be positive");
    for (std::size_t n : s.resolutions) {
        require(n > 0, "experiment: resolutions must be positive");
        require(s.reference_n % n == 0, "experiment: reference_n must be a multiple of every resolution");
    }
    require(s.omega_hi > s.omega_lo, "experiment: empty Omega range");
    if (s.variant == Variant::staggered1d)
        require(!has_metric(s, Metric::l1), "experiment: the staggered variant supports the w1 metric only");
}

inline SchemeConfig scheme_config(const ExperimentSpec& s, bool two_d)
{
    SchemeConfig cfg;
    cfg.cfl_number = s.cfl_number;
    cfg.t_final = s.t_final;
    cfg.variant = two_d ? Variant::unstaggered2d : s.variant;
    cfg.mode = s.mode;
    cfg.step_policy = s.step_policy;
    cfg.boundary_defect_tol = s.boundary_defect_tol;
    cfg.record_diagnostics = false;
    return cfg;
}

inline Grid2D grid_2d(const ExperimentSpec& s, std::size_t n)
{
    return {Grid1D::torus(n), Grid1D::line(n, s.omega_lo, s.omega_hi)};
}

/// Final state of one run of the experiment at resolution n.
struct StudyRun {
    std::variant<Measure1D, Measure2D> state;
    std::size_t steps = 0;
};

inline StudyRun run_experiment(const ExperimentSpec& s, const Builtin& b, std::size_t n)
{
    if (b.two_dimensional) {
        require(s.variant != Variant::staggered1d, "experiment: staggered variant is one-dimensional");
        const KuramotoNonIdentical field{s.coupling_k, b.omega_min, b.omega_max};
        auto rec = run_to_time(std::get<InitialDatum2D>(b.datum), field, scheme_config(s, true), grid_2d(s, n));
        return {std::move(rec.final_state), rec.steps};
    }
    require(s.variant != Variant::unstaggered2d, "experiment: one-dimensional datum needs a 1D variant");
    const KuramotoIdentical field{s.coupling_k};
    auto rec = run_to_time(std::get<InitialDatum>(b.datum), field, scheme_config(s, false), Grid1D::torus(n));
    return {std::move(rec.final_state), rec.steps};
}

/// Runs every resolution and the reference, then tabulates the distance of
/// each coarse solution to the reference at t_final. W1 compares the atomic
/// representations, L1 the piecewise-constant densities (mass / cell volume).
inline ErrorTable run_convergence_study(const ExperimentSpec& spec)
{
    validate(spec);
    const Builtin b = builtin_datum(spec.name);
    ErrorTable table;

    StudyRun ref;
    try {
        ref = run_experiment(spec, b, spec.reference_n);
    } catch (const SolverFailure& e) {
        table.complete = false;
        table.failure = "reference N=" + std::to_string(spec.reference_n) + ": " + e.what();
        return table;
    }

    auto errors_for = [&](std::size_t n) {
        ErrorRow row{n, {}, {}, {}, {}};
        const StudyRun run = run_experiment(spec, b, n);
        if (b.two_dimensional) {
            const auto& m = std::get<Measure2D>(run.state);
            const auto& r = std::get<Measure2D>(ref.state);
            if (has_metric(spec, Metric::l1)) row.err_l1 = l1_distance_nested(to_density(m), to_density(r));
        } else {
            const auto& m = std::get<Measure1D>(run.state);
            const auto& r = std::get<Measure1D>(ref.state);
            if (has_metric(spec, Metric::w1)) row.err_w1 = wasserstein1(m, r);
            if (has_metric(spec, Metric::l1)) row.err_l1 = l1_distance_nested(to_density(m), to_density(r));
        }
        return row;
    };

    std::vector<std::future<ErrorRow>> pending;
    for (std::size_t n : spec.resolutions)
        pending.push_back(std::async(spec.concurrent ? std::launch::async : std::launch::deferred, errors_for, n));
    for (auto& f : pending) {
        try {
            table.rows.push_back(f.get());
        } catch (const SolverFailure& e) {
            if (table.complete) table.failure = e.what();
            table.complete = false;
        }
    }
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
        auto& cur = table.rows[k];
        const auto& prev = table.rows[k - 1];
        const double factor = static_cast<double>(cur.n) / static_cast<double>(prev.n);
        if (cur.err_w1 && prev.err_w1) cur.eoc_w1 = eoc(*prev.err_w1, *cur.err_w1, factor);
        if (cur.err_l1 && prev.err_l1) cur.eoc_l1 = eoc(*prev.err_l1, *cur.err_l1, factor);
    }
    return table;
}

} // namespace nlfv
