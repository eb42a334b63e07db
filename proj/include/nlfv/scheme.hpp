#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"
#include "nlfv/velocity.hpp"
#include "nlfv/wasserstein.hpp"

namespace nlfv {

enum class Variant { unstaggered1d, staggered1d, unstaggered2d };
enum class Mode { measure, density };

/// How the step size is chosen. declared_bound: dt = cfl * h / c1 with c1
/// from the field's declared bounds. adaptive: dt = cfl * h / max|V[mu^n]|,
/// recomputed every step from the current velocity.
enum class StepPolicy { declared_bound, adaptive };

struct SchemeConfig {
    double cfl_number = 0.4;
    double lambda0 = 1e-3; // lower bound on dt / h
    double t_final = 0.5;
    Variant variant = Variant::unstaggered1d;
    Mode mode = Mode::measure;
    StepPolicy step_policy = StepPolicy::adaptive;
    // adaptive steps never exceed this mesh ratio (guards a vanishing field)
    double max_mesh_ratio = 10.0;
    // largest tolerated mass loss through truncated boundaries, relative to
    // the initial mass
    double boundary_defect_tol = 1e-8;
    bool record_diagnostics = true;
    bool keep_history = false;
};

inline double cfl_limit(Variant v) { return v == Variant::unstaggered1d ? 1.0 : 0.5; }

inline const char* to_string(Variant v)
{
    switch (v) {
    case Variant::unstaggered1d: return "unstaggered1d";
    case Variant::staggered1d: return "staggered1d";
    case Variant::unstaggered2d: return "unstaggered2d";
    }
    return "?";
}

inline void validate(const SchemeConfig& cfg)
{
    require(cfg.cfl_number > 0.0 && cfg.cfl_number <= cfl_limit(cfg.variant),
            "cfl_number " + std::to_string(cfg.cfl_number) + " out of range (0, " + std::to_string(cfl_limit(cfg.variant)) +
                "] for variant " + to_string(cfg.variant));
    require(cfg.lambda0 > 0.0 && std::isfinite(cfg.lambda0), "lambda0 must be positive");
    require(cfg.t_final >= 0.0 && std::isfinite(cfg.t_final), "t_final must be finite and nonnegative");
    require(cfg.max_mesh_ratio > 0.0, "max_mesh_ratio must be positive");
    require(cfg.boundary_defect_tol >= 0.0, "boundary_defect_tol must be nonnegative");
}

inline double cfl_dt(const SchemeConfig& cfg, const Grid1D& grid, const VelocityBounds& b)
{
    validate(cfg);
    require(b.c1 > 0.0, "cfl_dt: c1 must be positive");
    return cfg.cfl_number * grid.dx() / b.c1;
}

inline double cfl_dt(const SchemeConfig& cfg, const Grid2D& grid, const VelocityBounds& b)
{
    validate(cfg);
    require(b.c1 > 0.0, "cfl_dt: c1 must be positive");
    const double dt = cfg.cfl_number * std::min(grid.dx(), grid.dy()) / b.c1;
    require(dt * b.c1 / std::min(grid.dx(), grid.dy()) <= 0.5 + 1e-15, "cfl_dt: two-dimensional bound exceeded");
    return dt;
}

/// dt = cfl * h / max|V|, with the speed floored so dt / h <= max_mesh_ratio.
inline double adaptive_dt(const SchemeConfig& cfg, double h, double vmax)
{
    const double floor_speed = cfg.cfl_number / cfg.max_mesh_ratio;
    return cfg.cfl_number * h / std::max(vmax, floor_speed);
}

inline double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

namespace detail {
inline constexpr double cfl_slack = 1e-12;

// Results below the smallest normal double are stored as exact zeros;
// subnormal arithmetic is orders of magnitude slower.
inline double flush(double x) { return x < std::numeric_limits<double>::min() ? 0.0 : x; }

inline void check_cfl(double courant, double limit, const char* who)
{
    if (!(courant <= limit * (1.0 + cfl_slack)))
        throw CflViolation(std::string(who) + ": CFL violated (dt*max|v|/h = " + std::to_string(courant) +
                           " > " + std::to_string(limit) + ")");
}
} // namespace detail

/// mu_i^{n+1} = (mu_{i-1} + mu_{i+1}) / 2 - dt (V_{i+1} mu_{i+1} - V_{i-1} mu_{i-1}) / (2 dx),
/// evaluated in its convex-combination form. Off-grid neighbours of a
/// non-periodic grid are zero. The _into forms write into a caller-owned
/// buffer, which is resized as needed.
inline void lxf_step_unstaggered_1d_into(const Measure1D& m, std::span<const double> v, double dt, Measure1D& out)
{
    const auto& g = m.grid;
    const std::size_t n = g.n_cells;
    require(v.size() == n, "lxf_step_unstaggered_1d: velocity size mismatch");
    const double lambda = dt / g.dx();
    detail::check_cfl(lambda * max_abs(v), 1.0, "lxf_step_unstaggered_1d");

    out.grid = g;
    out.masses.assign(n, 0.0);
    auto weight_from = [&](std::size_t j, double sign) {
        // share of cell j's mass sent towards its right (+) or left (-) neighbour
        return std::max(0.0, 0.5 * (1.0 + sign * lambda * v[j])) * m.masses[j];
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t l = g.neighbour(i, -1), r = g.neighbour(i, 1);
        double s = 0.0;
        if (l < n) s += weight_from(l, 1.0);
        if (r < n) s += weight_from(r, -1.0);
        out.masses[i] = detail::flush(s);
    }
}

inline Measure1D lxf_step_unstaggered_1d(const Measure1D& m, std::span<const double> v, double dt)
{
    Measure1D out;
    lxf_step_unstaggered_1d_into(m, v, dt, out);
    return out;
}

/// Direction of a staggered step: forward writes to x_{i+1/2}, backward to
/// x_{i-1/2}. Alternating the two returns to the original grid after every
/// second step.
enum class Stagger { forward, backward };

inline void lxf_step_staggered_1d_into(const Measure1D& m, std::span<const double> v, double dt, Stagger dir,
                                       Measure1D& out)
{
    const auto& g = m.grid;
    const std::size_t n = g.n_cells;
    require(v.size() == n, "lxf_step_staggered_1d: velocity size mismatch");
    const double lambda = dt / g.dx();
    detail::check_cfl(lambda * max_abs(v), 0.5, "lxf_step_staggered_1d");

    Grid1D shifted = g;
    const double shift = (dir == Stagger::forward ? 0.5 : -0.5) * g.dx();
    shifted.x_min += shift;
    shifted.x_max += shift;
    out.grid = shifted;
    out.masses.assign(n, 0.0);
    // new cell k sits between old cells lo = k + off and hi = lo + 1
    const long off = dir == Stagger::forward ? 0 : -1;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = g.neighbour(k, off), hi = g.neighbour(k, off + 1);
        double s = 0.0;
        if (lo < n) s += std::max(0.0, 0.5 + lambda * v[lo]) * m.masses[lo];
        if (hi < n) s += std::max(0.0, 0.5 - lambda * v[hi]) * m.masses[hi];
        out.masses[k] = detail::flush(s);
    }
}

inline Measure1D lxf_step_staggered_1d(const Measure1D& m, std::span<const double> v, double dt, Stagger dir)
{
    Measure1D out;
    lxf_step_staggered_1d_into(m, v, dt, dir, out);
    return out;
}

/// Two-dimensional update averaging the four axis neighbours. v2 may be
/// empty, meaning V2 == 0.
inline void lxf_step_2d_into(const Measure2D& m, std::span<const double> v1, std::span<const double> v2, double dt,
                             Measure2D& out)
{
    const auto& g = m.grid;
    const std::size_t nx = g.nx(), ny = g.ny();
    require(v1.size() == g.size() && (v2.empty() || v2.size() == g.size()), "lxf_step_2d: velocity size mismatch");
    const double h = std::min(g.dx(), g.dy());
    detail::check_cfl(dt * std::max(max_abs(v1), max_abs(v2)) / h, 0.5, "lxf_step_2d");
    const double lx = 0.5 * dt / g.dx(), ly = 0.5 * dt / g.dy();

    out.grid = g;
    out.masses.resize(g.size());
    const double* mm = m.masses.data();
    const double* a1 = v1.data();
    const double* a2 = v2.empty() ? nullptr : v2.data();
    for (std::size_t i = 0; i < nx; ++i) {
        double* o = out.masses.data() + g.index(i, 0);
        std::fill(o, o + ny, 0.0);
        const std::size_t il = g.theta.neighbour(i, -1), ir = g.theta.neighbour(i, 1);
        if (il < nx) {
            const double* ml = mm + g.index(il, 0);
            const double* vl = a1 + g.index(il, 0);
            for (std::size_t j = 0; j < ny; ++j) o[j] += std::max(0.0, 0.25 + lx * vl[j]) * ml[j];
        }
        if (ir < nx) {
            const double* mr = mm + g.index(ir, 0);
            const double* vr = a1 + g.index(ir, 0);
            for (std::size_t j = 0; j < ny; ++j) o[j] += std::max(0.0, 0.25 - lx * vr[j]) * mr[j];
        }
        const double* row = mm + g.index(i, 0);
        const double* w2 = a2 ? a2 + g.index(i, 0) : nullptr;
        auto omega_part = [&](std::size_t j) {
            const std::size_t jl = g.omega.neighbour(j, -1), jr = g.omega.neighbour(j, 1);
            double s = 0.0;
            if (jl < ny) s += std::max(0.0, 0.25 + (w2 ? ly * w2[jl] : 0.0)) * row[jl];
            if (jr < ny) s += std::max(0.0, 0.25 - (w2 ? ly * w2[jr] : 0.0)) * row[jr];
            return s;
        };
        if (ny < 3 || w2) {
            for (std::size_t j = 0; j < ny; ++j) o[j] += omega_part(j);
        } else {
            o[0] += omega_part(0);
            for (std::size_t j = 1; j + 1 < ny; ++j) o[j] += 0.25 * (row[j - 1] + row[j + 1]);
            o[ny - 1] += omega_part(ny - 1);
        }
        for (std::size_t j = 0; j < ny; ++j) o[j] = detail::flush(o[j]);
    }
}

/// Same update for a separable field v1(i, j) = row_term[i] + col_term[j]
/// and v2 == 0, in a single pass. Returns the total mass of the result and,
/// when row_mass is non-empty, stores the mass of every theta row in it.
inline double lxf_step_2d_separable_into(const Measure2D& m, std::span<const double> row_term,
                                         std::span<const double> col_term, double dt, Measure2D& out,
                                         std::span<double> row_mass = {})
{
    const auto& g = m.grid;
    const std::size_t nx = g.nx(), ny = g.ny();
    require(row_term.size() == nx && col_term.size() == ny, "lxf_step_2d_separable: velocity size mismatch");
    require(row_mass.empty() || row_mass.size() == nx, "lxf_step_2d_separable: row mass size mismatch");
    const auto [cmin, cmax] = std::minmax_element(col_term.begin(), col_term.end());
    double vmax = 0.0;
    for (double r : row_term) vmax = std::max({vmax, std::abs(r + *cmin), std::abs(r + *cmax)});
    detail::check_cfl(dt * vmax / std::min(g.dx(), g.dy()), 0.5, "lxf_step_2d");
    const double lx = 0.5 * dt / g.dx();

    out.grid = g;
    out.masses.resize(g.size());
    const std::vector<double> zero_row(ny, 0.0);
    const double* mm = m.masses.data();
    const double* y = col_term.data();
    const bool wrap_omega = g.omega.periodic;
    double total = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        double* o = out.masses.data() + g.index(i, 0);
        const std::size_t il = g.theta.neighbour(i, -1), ir = g.theta.neighbour(i, 1);
        const double* ml = il < nx ? mm + g.index(il, 0) : zero_row.data();
        const double* mr = ir < nx ? mm + g.index(ir, 0) : zero_row.data();
        const double cl = il < nx ? row_term[il] : 0.0, cr = ir < nx ? row_term[ir] : 0.0;
        const double* row = mm + g.index(i, 0);
        auto cell = [&](std::size_t j, double below, double above) {
            const double s = std::max(0.0, 0.25 + lx * (cl + y[j])) * ml[j] +
                             std::max(0.0, 0.25 - lx * (cr + y[j])) * mr[j] + 0.25 * (below + above);
            return detail::flush(s);
        };
        if (ny == 1) {
            o[0] = cell(0, wrap_omega ? row[0] : 0.0, wrap_omega ? row[0] : 0.0);
        } else {
            o[0] = cell(0, wrap_omega ? row[ny - 1] : 0.0, row[1]);
            for (std::size_t j = 1; j + 1 < ny; ++j) o[j] = cell(j, row[j - 1], row[j + 1]);
            o[ny - 1] = cell(ny - 1, row[ny - 2], wrap_omega ? row[0] : 0.0);
        }
        double rm = 0.0;
        for (std::size_t j = 0; j < ny; ++j) rm += o[j];
        if (!row_mass.empty()) row_mass[i] = rm;
        total += rm;
    }
    return total;
}

inline Measure2D lxf_step_2d(const Measure2D& m, std::span<const double> v1, std::span<const double> v2, double dt)
{
    Measure2D out;
    lxf_step_2d_into(m, v1, v2, dt, out);
    return out;
}

// ---------------------------------------------------------------------------
// Time loop

struct StepDiagnostics {
    std::size_t step = 0;
    double time = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double min_mass = 0.0;
    double tv = 0.0;
    double w1_increment = 0.0; // NaN in 2D
    double boundary_defect = 0.0; // cumulative mass lost through truncated edges
};

template <class State>
struct RunRecord {
    std::vector<double> times;
    std::vector<State> snapshots;
    std::vector<StepDiagnostics> diagnostics; // entry 0 describes the initial state
    State final_state;
    double final_time = 0.0;
    std::size_t steps = 0;
    // Filled when SchemeConfig::keep_history is set: state, velocity and
    // step size at every t^n before the final time.
    std::vector<State> history;
    std::vector<std::vector<double>> velocity_history;
    std::vector<double> history_times;
    std::vector<double> history_dt;
};

namespace detail {

inline void check_snapshot_times(std::span<const double> ts, double t_final)
{
    for (std::size_t k = 0; k < ts.size(); ++k) {
        require(ts[k] >= 0.0 && ts[k] <= t_final, "snapshot time outside [0, t_final]");
        if (k) require(ts[k] > ts[k - 1], "snapshot times must be strictly increasing");
    }
}

inline double tv_of(const Measure1D& m) { return total_variation(to_density(m)); }
inline double tv_of(const Measure2D& m) { return total_variation(to_density(m)); }

inline StepDiagnostics diagnose(std::size_t step, double t, double dt, const Measure1D& m, const Measure1D* prev,
                                double defect, bool full)
{
    StepDiagnostics d{step, t, dt, mass(m), min_value(m.masses), 0.0, 0.0, defect};
    if (full) {
        d.tv = tv_of(m);
        if (prev) d.w1_increment = wasserstein1(*prev, m);
    }
    return d;
}

inline StepDiagnostics diagnose(std::size_t step, double t, double dt, const Measure2D& m, const Measure2D*,
                                double defect, bool full)
{
    StepDiagnostics d{step, t, dt, mass(m), min_value(m.masses), 0.0, std::numeric_limits<double>::quiet_NaN(), defect};
    if (full) d.tv = tv_of(m);
    return d;
}

// Generic explicit loop. velocity(state, n, v) fills v, propose_dt(state, v)
// returns the step and step(state, v, dt, n, next) fills next, optionally
// returning its mass. Buffers are reused across steps.
template <class State, class Velocity, class Propose, class Step>
RunRecord<State> time_loop(State initial, const SchemeConfig& cfg, std::span<const double> snapshot_times,
                           Velocity&& velocity, Propose&& propose_dt, Step&& step)
{
    check_snapshot_times(snapshot_times, cfg.t_final);
    RunRecord<State> rec;
    const double m0 = mass(initial);
    double defect = 0.0;
    std::size_t next_snap = 0;
    auto snap_exact = [&](double t, const State& s) {
        while (next_snap < snapshot_times.size() && snapshot_times[next_snap] == t) {
            rec.times.push_back(t);
            rec.snapshots.push_back(s);
            ++next_snap;
        }
    };

    State state = std::move(initial);
    State next;
    std::vector<double> v;
    double t = 0.0, m_now = m0;
    std::size_t n = 0;
    if (cfg.record_diagnostics) rec.diagnostics.push_back(diagnose(0, 0.0, 0.0, state, nullptr, 0.0, true));
    snap_exact(0.0, state);

    const double t_end = cfg.t_final;
    while (t < t_end) {
        velocity(state, n, v);
        double dt = propose_dt(state, v);
        require(dt > 0.0 && std::isfinite(dt), "time step is not positive");
        bool last = false;
        if (t + dt >= t_end * (1.0 - 1e-14)) {
            dt = t_end - t;
            last = true;
        }
        double m_next;
        if constexpr (std::is_void_v<decltype(step(state, v, dt, n, next))>) {
            step(state, v, dt, n, next);
            m_next = mass(next);
        } else {
            m_next = step(state, v, dt, n, next);
        }
        const double t_next = last ? t_end : t + dt;

        defect += m_now - m_next;
        m_now = m_next;
        if (defect > cfg.boundary_defect_tol * std::max(m0, std::numeric_limits<double>::min()) && defect > 0.0)
            throw BoundaryDefect("boundary mass defect " + std::to_string(defect) + " exceeds tolerance " +
                                 std::to_string(cfg.boundary_defect_tol) + " of total mass at t = " +
                                 std::to_string(t_next));

        while (next_snap < snapshot_times.size() && snapshot_times[next_snap] <= t_next) {
            const double ts = snapshot_times[next_snap];
            if (ts == t_next) break;
            rec.times.push_back(ts);
            rec.snapshots.push_back(interpolate_in_time(TimeInterpolant<State>{state, next, t, t_next}, ts));
            ++next_snap;
        }
        if (cfg.keep_history) {
            rec.history.push_back(state);
            rec.velocity_history.push_back(v);
            rec.history_times.push_back(t);
            rec.history_dt.push_back(dt);
        }
        if (cfg.record_diagnostics) rec.diagnostics.push_back(diagnose(n + 1, t_next, dt, next, &state, defect, true));
        std::swap(state, next);
        t = t_next;
        ++n;
        snap_exact(t, state);
    }
    rec.final_state = std::move(state);
    rec.final_time = t;
    rec.steps = n;
    return rec;
}

template <class Field>
VelocityBounds bounds_of(const Field& f) { return f.bounds(); }

} // namespace detail

/// Projects the datum according to cfg.mode: hat pairing for measure mode,
/// cell averages for density mode.
inline Measure1D project(const InitialDatum& datum, const Grid1D& grid, Mode mode)
{
    return mode == Mode::measure ? project_hat(datum, grid) : project_cells(datum, grid);
}

inline Measure2D project(const InitialDatum2D& datum, const Grid2D& grid, Mode mode)
{
    return mode == Mode::measure ? project_hat(datum, grid) : project_cells(datum, grid);
}

/// Number of extra cells per side a line-domain run needs so that no mass
/// reaches the truncated edge before t_final.
inline std::size_t causal_buffer_cells(const SchemeConfig& cfg, double dx, double c1)
{
    const double dt_min = cfg.cfl_number * dx / std::max(c1, cfg.cfl_number / cfg.max_mesh_ratio);
    return static_cast<std::size_t>(std::ceil(cfg.t_final / dt_min)) + 2;
}

/// Runs a one-dimensional scheme from an already projected state.
template <class Field>
RunRecord<Measure1D> run_from(Measure1D initial, const Field& field, const SchemeConfig& cfg,
                              std::span<const double> snapshot_times = {})
{
    validate(cfg);
    validate(initial);
    require(cfg.variant != Variant::unstaggered2d, "run_from: two-dimensional variant needs a 2D state");
    const VelocityBounds b = detail::bounds_of(field);
    if (cfg.step_policy == StepPolicy::declared_bound) require(b.c1 > 0.0, "run: declared c1 must be positive");
    if (b.c1 > 0.0) require(cfg.lambda0 <= cfg.cfl_number / b.c1, "run: lambda0 exceeds cfl_number / c1");
    if (cfg.variant == Variant::staggered1d)
        for (double ts : snapshot_times)
            require(ts == 0.0 || ts == cfg.t_final, "staggered runs only record snapshots at 0 and t_final");

    auto velocity = [&](const Measure1D& s, std::size_t, std::vector<double>& v) { v = eval_velocity_1d(field, s); };
    auto propose = [&](const Measure1D& s, const std::vector<double>& v) {
        const double dx = s.grid.dx();
        return cfg.step_policy == StepPolicy::adaptive ? adaptive_dt(cfg, dx, max_abs(v)) : cfg.cfl_number * dx / b.c1;
    };
    auto step = [&](const Measure1D& s, const std::vector<double>& v, double dt, std::size_t n, Measure1D& out) {
        if (cfg.variant == Variant::staggered1d)
            lxf_step_staggered_1d_into(s, v, dt, n % 2 == 0 ? Stagger::forward : Stagger::backward, out);
        else
            lxf_step_unstaggered_1d_into(s, v, dt, out);
    };
    return detail::time_loop(std::move(initial), cfg, snapshot_times, velocity, propose, step);
}

/// Projects the datum and runs the one-dimensional scheme to cfg.t_final.
/// Line domains are padded with a causal buffer so no mass is truncated.
template <class Field>
RunRecord<Measure1D> run_to_time(const InitialDatum& datum, const Field& field, const SchemeConfig& cfg,
                                 const Grid1D& grid, std::span<const double> snapshot_times = {})
{
    validate(cfg);
    validate(grid);
    Grid1D g = grid;
    if (!grid.periodic) {
        const std::size_t pad = causal_buffer_cells(cfg, grid.dx(), detail::bounds_of(field).c1);
        g = Grid1D::line(grid.n_cells + 2 * pad, grid.x_min - static_cast<double>(pad) * grid.dx(),
                         grid.x_max + static_cast<double>(pad) * grid.dx());
    }
    return run_from(project(datum, g, cfg.mode), field, cfg, snapshot_times);
}

/// Two-dimensional run. The field is carried in separable form: in the
/// velocity history each entry holds the theta-dependent coupling term
/// per theta row, V1(i, j) being that term plus the Omega cell centre.
inline RunRecord<Measure2D> run_from(Measure2D initial, const KuramotoNonIdentical& field, const SchemeConfig& cfg,
                                     std::span<const double> snapshot_times = {})
{
    validate(cfg);
    validate(initial);
    require(cfg.variant == Variant::unstaggered2d, "run_from: 2D state needs the unstaggered2d variant");
    const VelocityBounds b = field.bounds_on(initial.grid);
    require(cfg.lambda0 <= cfg.cfl_number / b.c1, "run: lambda0 exceeds cfl_number / c1");
    const Grid2D g = initial.grid;
    const double h = std::min(g.dx(), g.dy());
    std::vector<double> y(g.ny());
    for (std::size_t j = 0; j < g.ny(); ++j) y[j] = g.omega.center(j);
    const double y_lo = y.front(), y_hi = y.back();

    // row masses of the current state, refreshed by every step
    std::vector<double> rows(g.nx());
    for (std::size_t i = 0; i < g.nx(); ++i) {
        const double* row = initial.masses.data() + g.index(i, 0);
        rows[i] = std::accumulate(row, row + g.ny(), 0.0);
    }

    auto velocity = [&](const Measure2D&, std::size_t, std::vector<double>& coupling) {
        coupling.resize(g.nx());
        double c = 0.0, sn = 0.0;
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = g.theta.center(i);
            c += std::cos(x) * rows[i];
            sn += std::sin(x) * rows[i];
        }
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = g.theta.center(i);
            coupling[i] = -field.k * (std::sin(x) * c - std::cos(x) * sn);
        }
    };
    auto propose = [&](const Measure2D&, const std::vector<double>& coupling) {
        if (cfg.step_policy == StepPolicy::declared_bound) return cfg.cfl_number * h / b.c1;
        double vmax = 0.0;
        for (double r : coupling) vmax = std::max({vmax, std::abs(r + y_lo), std::abs(r + y_hi)});
        return adaptive_dt(cfg, h, vmax);
    };
    auto step = [&](const Measure2D& s, const std::vector<double>& coupling, double dt, std::size_t, Measure2D& out) {
        return lxf_step_2d_separable_into(s, coupling, y, dt, out, rows);
    };
    return detail::time_loop(std::move(initial), cfg, snapshot_times, velocity, propose, step);
}

inline RunRecord<Measure2D> run_to_time(const InitialDatum2D& datum, const KuramotoNonIdentical& field,
                                        const SchemeConfig& cfg, const Grid2D& grid,
                                        std::span<const double> snapshot_times = {})
{
    validate(cfg);
    validate(grid);
    return run_from(project(datum, grid, cfg.mode), field, cfg, snapshot_times);
}

// ---------------------------------------------------------------------------
// Discrete weak residual

/// Smooth test function phi(x, t) with its partial derivatives.
struct SpaceTimeTest {
    std::function<double(double, double)> value;
    std::function<double(double, double)> d_t;
    std::function<double(double, double)> d_x;
};

/// |sum_n sum_i dt_n m_i^n (phi_t + V_i^n phi_x)(x_i, t^n) + sum_i m_i^0 phi(x_i, 0)|.
/// Needs a record produced with keep_history.
inline double weak_residual(const RunRecord<Measure1D>& rec, const SpaceTimeTest& phi)
{
    require(!rec.history.empty() || rec.steps == 0, "weak_residual: run was recorded without history");
    if (!phi.value) return 0.0;
    double s = 0.0;
    for (std::size_t n = 0; n < rec.history.size(); ++n) {
        const auto& m = rec.history[n];
        const auto& v = rec.velocity_history[n];
        const double t = rec.history_times[n], dt = rec.history_dt[n];
        double inner = 0.0;
        for (std::size_t i = 0; i < m.masses.size(); ++i) {
            if (m.masses[i] == 0.0) continue;
            const double x = m.grid.center(i);
            inner += m.masses[i] * (phi.d_t(x, t) + v[i] * phi.d_x(x, t));
        }
        s += dt * inner;
    }
    const auto& m0 = rec.history.empty() ? rec.final_state : rec.history.front();
    for (std::size_t i = 0; i < m0.masses.size(); ++i) s += m0.masses[i] * phi.value(m0.grid.center(i), 0.0);
    return std::abs(s);
}

} // namespace nlfv
