#pragma once

// Command implementations behind the nlfv executable. Each returns a
// process exit code.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/experiments.hpp"
#include "nlfv/invariants.hpp"
#include "nlfv/io/config.hpp"
#include "nlfv/io/csv.hpp"
#include "nlfv/io/svg.hpp"
#include "nlfv/scheme.hpp"

namespace nlfv::cli {

enum ExitCode : int { ok = 0, config_error = 2, solver_failure = 3, invariant_failure = 4 };

struct Options {
    std::string out_dir = ".";
    std::optional<std::size_t> resolution;
    bool quiet = false;
    // fault injection for `check`
    std::optional<double> inject_cfl;
    bool inject_negative_mass = false;
};

namespace detail {

inline std::string join(const std::string& dir, const std::string& file) { return (std::filesystem::path(dir) / file).string(); }

inline void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw InvalidInput("output directory '" + dir + "' is not writable");
}

inline std::string cell(double x) { return std::isnan(x) ? std::string{} : io::format_number(x); }

inline void write_diagnostics(const std::string& path, const std::vector<StepDiagnostics>& diags)
{
    io::CsvWriter w(path);
    w.header({"step", "time", "mass", "min_mass", "tv", "w1_step_increment", "boundary_defect"});
    for (const auto& d : diags)
        w.row({std::to_string(d.step), cell(d.time), cell(d.mass), cell(d.min_mass), cell(d.tv), cell(d.w1_increment),
               cell(d.boundary_defect)});
}

inline void write_solution(const std::string& path, const Measure1D& m)
{
    io::CsvWriter w(path);
    w.header({"cell_center", "mass", "density_value"});
    const double dx = m.grid.dx();
    for (std::size_t i = 0; i < m.masses.size(); ++i) w.numbers({m.grid.center(i), m.masses[i], m.masses[i] / dx});
}

inline void write_solution(const std::string& path, const Measure2D& m)
{
    io::CsvWriter w(path);
    w.header({"theta_center", "omega_center", "mass", "density_value"});
    const double vol = m.grid.cell_volume();
    for (std::size_t i = 0; i < m.grid.nx(); ++i)
        for (std::size_t j = 0; j < m.grid.ny(); ++j) {
            const double mass_ij = m.masses[m.grid.index(i, j)];
            w.numbers({m.grid.theta.center(i), m.grid.omega.center(j), mass_ij, mass_ij / vol});
        }
}

inline io::Series density_series(const Measure1D& m, std::string label, std::string colour)
{
    std::vector<double> lo, val;
    for (std::size_t i = 0; i < m.masses.size(); ++i) {
        lo.push_back(m.grid.left_edge(i));
        val.push_back(m.masses[i] / m.grid.dx());
    }
    return io::step_series(lo, m.grid.dx(), val, std::move(label), std::move(colour));
}

// theta marginal of a 2D state as a 1D measure on the theta grid
inline Measure1D theta_marginal(const Measure2D& m)
{
    Measure1D out{m.grid.theta, std::vector<double>(m.grid.nx(), 0.0)};
    for (std::size_t i = 0; i < m.grid.nx(); ++i)
        for (std::size_t j = 0; j < m.grid.ny(); ++j) out.masses[i] += m.masses[m.grid.index(i, j)];
    return out;
}

inline Measure1D as_1d(const Measure1D& m) { return m; }
inline Measure1D as_1d(const Measure2D& m) { return theta_marginal(m); }

template <class Body>
int guarded(Body&& body)
{
    try {
        return body();
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver_failure;
    }
}

template <class State>
void emit_simulation(const RunRecord<State>& rec, std::size_t n, const io::RunConfig& cfg, const Options& opt,
                     const std::string& title)
{
    const std::string stem = "solution_N" + std::to_string(n);
    write_solution(join(opt.out_dir, stem + ".csv"), rec.final_state);
    write_diagnostics(join(opt.out_dir, "diagnostics.csv"), rec.diagnostics);
    if (cfg.emit_svg) {
        io::Plot p;
        p.title = title;
        p.x_label = "theta";
        p.y_label = std::is_same_v<State, Measure2D> ? "theta marginal density" : "density";
        if (!rec.snapshots.empty()) p.series.push_back(density_series(as_1d(rec.snapshots.front()), "t = 0", "#999999"));
        p.series.push_back(density_series(as_1d(rec.final_state), "t = " + io::format_number(rec.final_time), "#1f77b4"));
        io::write_svg(join(opt.out_dir, stem + ".svg"), p);
    }
}

} // namespace detail

inline int cmd_simulate(const io::RunConfig& cfg, const Options& opt)
{
    return detail::guarded([&] {
        std::size_t n = 0;
        if (opt.resolution) n = *opt.resolution;
        else if (cfg.resolutions.size() == 1) n = cfg.resolutions.front();
        else throw InvalidInput("simulate needs a single resolution (give one in the config or use --resolution)");
        require(n > 0, "resolution must be positive");
        detail::ensure_dir(opt.out_dir);

        const ExperimentSpec spec = io::to_spec(cfg);
        const Builtin b = builtin_datum(cfg.experiment);
        const std::vector<double> snaps{0.0, cfg.t_final};
        const std::span<const double> snap_span(snaps.data(), cfg.t_final > 0.0 ? 2 : 1);
        if (!opt.quiet) std::cerr << "simulate " << cfg.experiment << " N=" << n << " T=" << cfg.t_final << '\n';
        const std::string title = cfg.experiment + ", N = " + std::to_string(n);
        if (b.two_dimensional) {
            const KuramotoNonIdentical field{cfg.coupling_k, b.omega_min, b.omega_max};
            SchemeConfig sc = scheme_config(spec, true);
            sc.record_diagnostics = true;
            const auto rec = run_to_time(std::get<InitialDatum2D>(b.datum), field, sc, grid_2d(spec, n), snap_span);
            detail::emit_simulation(rec, n, cfg, opt, title);
        } else {
            const KuramotoIdentical field{cfg.coupling_k};
            SchemeConfig sc = scheme_config(spec, false);
            sc.record_diagnostics = true;
            const auto rec = run_to_time(std::get<InitialDatum>(b.datum), field, sc, Grid1D::torus(n), snap_span);
            detail::emit_simulation(rec, n, cfg, opt, title);
        }
        if (!opt.quiet) std::cerr << "wrote " << detail::join(opt.out_dir, "solution_N" + std::to_string(n) + ".csv") << '\n';
        return static_cast<int>(ok);
    });
}

inline void write_table(const std::string& path, const ErrorTable& t)
{
    io::CsvWriter w(path);
    w.header({"N", "err_w1", "eoc_w1", "err_l1", "eoc_l1"});
    for (const auto& r : t.rows)
        w.row({std::to_string(r.n), io::format_cell(r.err_w1), io::format_cell(r.eoc_w1), io::format_cell(r.err_l1),
               io::format_cell(r.eoc_l1)});
}

inline io::Plot convergence_plot(const ErrorTable& t, const std::string& title)
{
    io::Plot p;
    p.title = title;
    p.x_label = "N";
    p.y_label = "error";
    p.log_x = p.log_y = true;
    io::Series w1{"W1", {}, {}, "#1f77b4", false, true}, l1{"L1", {}, {}, "#d62728", false, true};
    for (const auto& r : t.rows) {
        if (r.err_w1) w1.x.push_back(static_cast<double>(r.n)), w1.y.push_back(*r.err_w1);
        if (r.err_l1) l1.x.push_back(static_cast<double>(r.n)), l1.y.push_back(*r.err_l1);
    }
    double anchor = 0.0;
    for (const auto* s : {&w1, &l1}) {
        if (s->x.empty()) continue;
        p.series.push_back(*s);
        anchor = std::max(anchor, s->y.front());
    }
    if (!t.rows.empty() && anchor > 0.0) {
        const double n0 = static_cast<double>(t.rows.front().n), n1 = static_cast<double>(t.rows.back().n);
        p.series.push_back({"slope 1", {n0, n1}, {anchor, anchor * n0 / n1}, "#555555", true});
        p.series.push_back({"slope 1/2", {n0, n1}, {anchor, anchor * std::sqrt(n0 / n1)}, "#aaaaaa", true});
    }
    return p;
}

inline int cmd_converge(const io::RunConfig& cfg, const Options& opt)
{
    return detail::guarded([&] {
        io::RunConfig c = cfg;
        if (opt.resolution) c.resolutions = {*opt.resolution};
        require(c.resolutions.size() >= 2, "converge needs at least two resolutions");
        detail::ensure_dir(opt.out_dir);
        ExperimentSpec spec = io::to_spec(c);
        spec.concurrent = false;
        if (!opt.quiet)
            std::cerr << "converge " << c.experiment << " with reference N=" << c.reference_n << " ("
                      << c.resolutions.size() << " resolutions)\n";
        const ErrorTable t = run_convergence_study(spec);
        write_table(detail::join(opt.out_dir, "table.csv"), t);
        if (c.emit_svg) io::write_svg(detail::join(opt.out_dir, "convergence.svg"), convergence_plot(t, c.experiment));
        if (!opt.quiet)
            for (const auto& r : t.rows)
                std::cerr << "  N=" << r.n << "  w1=" << io::format_cell(r.err_w1) << "  l1=" << io::format_cell(r.err_l1)
                          << '\n';
        if (!t.complete) {
            std::cerr << "solver failure: " << t.failure << " (table is partial)\n";
            return static_cast<int>(solver_failure);
        }
        return static_cast<int>(ok);
    });
}

inline int cmd_check(const io::RunConfig& cfg, const Options& opt)
{
    return detail::guarded([&] {
        CheckOptions co;
        co.seed = cfg.seed;
        co.inject_cfl = opt.inject_cfl;
        co.inject_negative_mass = opt.inject_negative_mass;
        const CheckReport rep = run_invariant_suite(co);
        for (const auto& r : rep.results)
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        if (!rep.passed()) {
            std::cerr << "invariant failure\n";
            return static_cast<int>(invariant_failure);
        }
        return static_cast<int>(ok);
    });
}

} // namespace nlfv::cli
