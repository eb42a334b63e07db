#pragma once

// JSON run configuration shared by the CLI commands.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlfv/error.hpp"
#include "nlfv/experiments.hpp"
#include "nlfv/scheme.hpp"

namespace nlfv::io {

struct RunConfig {
    std::string experiment = "parabolic1d";
    Variant variant = Variant::unstaggered1d;
    Mode mode = Mode::measure;
    StepPolicy step_policy = StepPolicy::adaptive;
    double cfl_number = 0.4;
    double t_final = 0.5;
    std::vector<std::size_t> resolutions{32, 64, 128, 256, 512};
    std::size_t reference_n = 4096;
    double coupling_k = 1.0;
    // Omega extent of the 2D grid
    double omega_min = -0.5;
    double omega_max = 1.5;
    double boundary_defect_tol = 1e-8;
    std::vector<Metric> metrics{Metric::w1, Metric::l1};
    bool emit_svg = true;
    std::uint64_t seed = 20240601;
};

/// Defaults that differ between the one- and two-dimensional benchmarks.
inline RunConfig defaults_for(const std::string& experiment)
{
    RunConfig c;
    c.experiment = experiment;
    if (experiment == "polynomial2d") {
        c.variant = Variant::unstaggered2d;
        c.resolutions = {32, 64, 128, 256, 512, 1024};
        c.metrics = {Metric::l1};
        c.boundary_defect_tol = 0.1;
    }
    return c;
}

namespace detail {

inline Variant parse_variant(const std::string& s)
{
    if (s == "unstaggered1d") return Variant::unstaggered1d;
    if (s == "staggered1d") return Variant::staggered1d;
    if (s == "unstaggered2d") return Variant::unstaggered2d;
    throw InvalidInput("config: unknown variant '" + s + "' (unstaggered1d, staggered1d, unstaggered2d)");
}

inline Mode parse_mode(const std::string& s)
{
    if (s == "measure") return Mode::measure;
    if (s == "density") return Mode::density;
    throw InvalidInput("config: unknown mode '" + s + "' (measure, density)");
}

inline StepPolicy parse_policy(const std::string& s)
{
    if (s == "adaptive") return StepPolicy::adaptive;
    if (s == "declared_bound") return StepPolicy::declared_bound;
    throw InvalidInput("config: unknown step_policy '" + s + "' (adaptive, declared_bound)");
}

inline Metric parse_metric(const std::string& s)
{
    if (s == "w1") return Metric::w1;
    if (s == "l1") return Metric::l1;
    throw InvalidInput("config: unknown metric '" + s + "' (w1, l1)");
}

template <class T>
T get(const nlohmann::json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: field '") + key + "' has the wrong type (" + e.what() + ")");
    }
}

} // namespace detail

inline RunConfig parse_config(const nlohmann::json& j)
{
    if (!j.is_object()) throw InvalidInput("config: top level must be a JSON object");
    static const std::set<std::string> known{"experiment", "variant",   "mode",          "cfl_number",
                                             "t_final",    "resolutions", "reference_n", "coupling_k",
                                             "omega_min",  "omega_max", "metrics",       "emit_svg",
                                             "seed",       "step_policy", "boundary_defect_tol"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw InvalidInput("config: unknown field '" + key + "'");

    RunConfig c = defaults_for(j.contains("experiment") ? detail::get<std::string>(j, "experiment") : "parabolic1d");
    (void)builtin_datum(c.experiment);
    if (j.contains("variant")) c.variant = detail::parse_variant(detail::get<std::string>(j, "variant"));
    if (j.contains("mode")) c.mode = detail::parse_mode(detail::get<std::string>(j, "mode"));
    if (j.contains("step_policy")) c.step_policy = detail::parse_policy(detail::get<std::string>(j, "step_policy"));
    if (j.contains("cfl_number")) c.cfl_number = detail::get<double>(j, "cfl_number");
    if (j.contains("t_final")) c.t_final = detail::get<double>(j, "t_final");
    if (j.contains("resolutions")) c.resolutions = detail::get<std::vector<std::size_t>>(j, "resolutions");
    if (j.contains("reference_n")) c.reference_n = detail::get<std::size_t>(j, "reference_n");
    if (j.contains("coupling_k")) c.coupling_k = detail::get<double>(j, "coupling_k");
    if (j.contains("omega_min")) c.omega_min = detail::get<double>(j, "omega_min");
    if (j.contains("omega_max")) c.omega_max = detail::get<double>(j, "omega_max");
    if (j.contains("boundary_defect_tol")) c.boundary_defect_tol = detail::get<double>(j, "boundary_defect_tol");
    if (j.contains("metrics")) {
        c.metrics.clear();
        for (const auto& m : detail::get<std::vector<std::string>>(j, "metrics")) c.metrics.push_back(detail::parse_metric(m));
    }
    if (j.contains("emit_svg")) c.emit_svg = detail::get<bool>(j, "emit_svg");
    if (j.contains("seed")) c.seed = detail::get<std::uint64_t>(j, "seed");

    const bool two_d = builtin_datum(c.experiment).two_dimensional;
    require(two_d == (c.variant == Variant::unstaggered2d),
            std::string("config: variant ") + to_string(c.variant) + " does not match experiment " + c.experiment);
    require(c.cfl_number > 0.0 && c.cfl_number <= cfl_limit(c.variant), "config: cfl_number out of range for variant");
    require(c.t_final >= 0.0, "config: t_final must be nonnegative");
    require(c.coupling_k >= 0.0, "config: coupling_k must be nonnegative");
    require(c.omega_max > c.omega_min, "config: omega_max must exceed omega_min");
    require(!c.resolutions.empty(), "config: resolutions must not be empty");
    for (auto n : c.resolutions) require(n > 0, "config: resolutions must be positive");
    return c;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

inline ExperimentSpec to_spec(const RunConfig& c)
{
    ExperimentSpec s;
    s.name = c.experiment;
    s.coupling_k = c.coupling_k;
    s.resolutions = c.resolutions;
    s.reference_n = c.reference_n;
    s.t_final = c.t_final;
    s.cfl_number = c.cfl_number;
    s.metrics = c.metrics;
    s.variant = c.variant;
    s.mode = c.mode;
    s.step_policy = c.step_policy;
    s.omega_lo = c.omega_min;
    s.omega_hi = c.omega_max;
    s.boundary_defect_tol = c.boundary_defect_tol;
    return s;
}

} // namespace nlfv::io
