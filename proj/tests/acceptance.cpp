// Acceptance checks for the benchmark tables, invariants and oracles.
// Usage: acceptance [criterion...]; prints one PASS/FAIL line per criterion
// and exits nonzero when any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "nlfv/io/config.hpp"
#include "nlfv/nlfv.hpp"

using namespace nlfv;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

std::string num(double x, int digits = 4)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ErrorTable timed_study(const ExperimentSpec& s, double& elapsed)
{
    const auto t0 = std::chrono::steady_clock::now();
    ErrorTable t = run_convergence_study(s);
    elapsed = seconds_since(t0);
    return t;
}

void fail(Outcome& o, const std::string& why)
{
    o.passed = false;
    o.detail += " [" + why + "]";
}

std::string column(const ErrorTable& t, std::optional<double> ErrorRow::*field, int digits = 4)
{
    std::string s;
    for (const auto& r : t.rows) s += (s.empty() ? "" : " ") + ((r.*field) ? num(*(r.*field), digits) : std::string("-"));
    return s;
}

Outcome table1()
{
    const std::vector<double> w1{0.1351, 0.0634, 0.0303, 0.0153, 0.0073};
    const std::vector<double> w1_eoc{0.0, 1.09, 1.07, 0.99, 1.07};
    const std::vector<double> l1{0.2811, 0.1336, 0.0663, 0.0336, 0.0157};
    ExperimentSpec s;
    s.name = "parabolic1d";
    double secs = 0.0;
    const auto t = timed_study(s, secs);
    Outcome o;
    o.detail = "W1 " + column(t, &ErrorRow::err_w1) + "; EOC " + column(t, &ErrorRow::eoc_w1, 2) + "; L1 " +
               column(t, &ErrorRow::err_l1) + "; " + num(secs, 1) + " s";
    if (!t.complete || t.rows.size() != 5) {
        fail(o, "incomplete table: " + t.failure);
        return o;
    }
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& r = t.rows[k];
        if (std::abs(*r.err_w1 / w1[k] - 1.0) > 0.10) fail(o, "W1 off by >10% at N=" + std::to_string(r.n));
        if (std::abs(*r.err_l1 / l1[k] - 1.0) > 0.10) fail(o, "L1 off by >10% at N=" + std::to_string(r.n));
        if (k && std::abs(*r.eoc_w1 - w1_eoc[k]) > 0.15) fail(o, "W1 EOC off by >0.15 at N=" + std::to_string(r.n));
    }
    if (secs >= 30.0) fail(o, "runtime above 30 s");
    return o;
}

Outcome table2()
{
    ExperimentSpec s;
    s.name = "piecewise_constant1d";
    double secs = 0.0;
    const auto t = timed_study(s, secs);
    Outcome o;
    o.detail = "W1 EOC " + column(t, &ErrorRow::eoc_w1, 2) + "; L1 EOC " + column(t, &ErrorRow::eoc_l1, 2);
    if (!t.complete || t.rows.size() != 5) {
        fail(o, "incomplete table: " + t.failure);
        return o;
    }
    for (std::size_t k = 1; k < 5; ++k) {
        const auto& r = t.rows[k];
        if (std::abs(*r.eoc_w1 - 1.0) > 0.1) fail(o, "W1 EOC outside 1 +- 0.1 at N=" + std::to_string(r.n));
        if (r.n >= 128 && (*r.eoc_l1 < 0.55 || *r.eoc_l1 > 0.95))
            fail(o, "L1 EOC outside [0.55, 0.95] at N=" + std::to_string(r.n));
    }
    return o;
}

Outcome table3()
{
    ExperimentSpec s;
    s.name = "singular1d";
    double secs = 0.0;
    const auto t = timed_study(s, secs);
    Outcome o;
    o.detail = "W1 EOC " + column(t, &ErrorRow::eoc_w1, 2) + "; L1 " + column(t, &ErrorRow::err_l1);
    if (!t.complete || t.rows.size() != 5) {
        fail(o, "incomplete table: " + t.failure);
        return o;
    }
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& r = t.rows[k];
        if (k && (*r.eoc_w1 < 0.55 || *r.eoc_w1 > 0.85)) fail(o, "W1 EOC outside [0.55, 0.85] at N=" + std::to_string(r.n));
        if (!(*r.err_l1 > 0.4)) fail(o, "L1 error not above 0.4 at N=" + std::to_string(r.n));
    }
    return o;
}

Outcome table4()
{
    const std::vector<double> target{0.0, 0.36, 0.45, 0.58, 0.72, 0.87};
    const ExperimentSpec s = io::to_spec(io::defaults_for("polynomial2d"));
    double secs = 0.0;
    const auto t = timed_study(s, secs);
    Outcome o;
    o.detail = "L1 " + column(t, &ErrorRow::err_l1) + "; EOC " + column(t, &ErrorRow::eoc_l1, 2) + "; reference N=" +
               std::to_string(s.reference_n) + "; " + num(secs, 1) + " s";
    if (!t.complete || t.rows.size() != 6) {
        fail(o, "incomplete table: " + t.failure);
        return o;
    }
    for (std::size_t k = 1; k < 6; ++k) {
        const auto& r = t.rows[k];
        if (!(*r.err_l1 < *t.rows[k - 1].err_l1)) fail(o, "L1 error not decreasing at N=" + std::to_string(r.n));
        if (std::abs(*r.eoc_l1 - target[k]) > 0.15) fail(o, "EOC off by >0.15 at N=" + std::to_string(r.n));
        if (k > 1 && !(*r.eoc_l1 > *t.rows[k - 1].eoc_l1)) fail(o, "EOC not increasing at N=" + std::to_string(r.n));
    }
    if (secs >= 600.0) fail(o, "runtime above 10 min");
    return o;
}

Outcome report(const std::vector<InvariantResult>& rs)
{
    Outcome o;
    for (const auto& r : rs) {
        o.detail += (o.detail.empty() ? "" : "; ") + r.name + (r.passed ? " ok" : " FAILED") + " (" + r.detail + ")";
        if (!r.passed) o.passed = false;
    }
    return o;
}

Outcome invariants() { return report(check_step_invariants(CheckOptions{})); }

Outcome oracles() { return report(check_oracles(CheckOptions{})); }

Outcome particles()
{
    const std::vector<std::size_t> ns{64, 128, 256, 512};
    const auto e = particle_cross_errors(ns);
    Outcome o;
    o.detail = "W1 at N=64..512:";
    for (double x : e) o.detail += " " + num(x);
    o.detail += "; ratios";
    for (std::size_t k = 1; k < e.size(); ++k) {
        o.detail += " " + num(e[k - 1] / e[k], 3);
        if (!(e[k] < e[k - 1])) fail(o, "not monotone at N=" + std::to_string(ns[k]));
        if (e[k - 1] / e[k] < 1.5) fail(o, "ratio below 1.5 at N=" + std::to_string(ns[k]));
    }
    return o;
}

Outcome weak_residual_ratio()
{
    const auto d = std::get<InitialDatum>(builtin_datum("parabolic1d").datum);
    const double t_final = 0.5, centre = pi, width = 0.5;
    auto bump = [=](double x) { return std::exp(-(x - centre) * (x - centre) / (width * width)); };
    auto ramp = [=](double t) { return std::pow(std::cos(pi * t / (2 * t_final)), 2); };
    const SpaceTimeTest phi{
        [=](double x, double t) { return bump(x) * ramp(t); },
        [=](double x, double t) { return -bump(x) * pi / (2 * t_final) * std::sin(pi * t / t_final); },
        [=](double x, double t) { return -2 * (x - centre) / (width * width) * bump(x) * ramp(t); }};
    auto residual = [&](std::size_t n) {
        SchemeConfig cfg;
        cfg.t_final = t_final;
        cfg.keep_history = true;
        cfg.record_diagnostics = false;
        return weak_residual(run_to_time(d, KuramotoIdentical{1.0}, cfg, Grid1D::torus(n)), phi);
    };
    const double r1 = residual(128), r2 = residual(256);
    Outcome o;
    o.detail = "residual N=128 " + num(r1, 6) + ", N=256 " + num(r2, 6) + ", ratio " + num(r1 / r2, 3);
    if (!(r1 / r2 >= 1.7)) fail(o, "ratio below 1.7");
    return o;
}

struct Criterion {
    const char* title;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {"smooth datum table", table1},
        {"piecewise constant datum table", table2},
        {"singular datum table", table3},
        {"two-dimensional table", table4},
        {"step invariants", invariants},
        {"oracle equivalences", oracles},
        {"particle cross-validation", particles},
        {"weak residual consistency", weak_residual_ratio},
    };
    return all;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::size_t> which;
    for (int i = 1; i < argc; ++i) which.push_back(static_cast<std::size_t>(std::atoi(argv[i])));
    if (which.empty())
        for (std::size_t c = 1; c <= criteria().size(); ++c) which.push_back(c);

    bool all_passed = true;
    for (std::size_t c : which) {
        if (c < 1 || c > criteria().size()) {
            std::cerr << "unknown criterion " << c << '\n';
            return 2;
        }
        const auto& crit = criteria()[c - 1];
        Outcome o;
        try {
            o = crit.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c << " (" << crit.title << "): " << o.detail
                  << std::endl;
        all_passed = all_passed && o.passed;
    }
    return all_passed ? 0 : 1;
}
