#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <vector>

#include "nlfv/error.hpp"

namespace nlfv::quad {

// Composite Simpson rule with an even number of subintervals.
template <class F>
double simpson(const F& f, double a, double b, std::size_t n_sub)
{
    if (n_sub % 2) ++n_sub;
    const double h = (b - a) / static_cast<double>(n_sub);
    double s = f(a) + f(b);
    for (std::size_t k = 1; k < n_sub; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(k) * h);
    return s * h / 3.0;
}

struct RefinementOptions {
    std::size_t initial_panels = 8;
    double rel_tol = 1e-13;
    double abs_tol = 1e-15;
    int max_depth = 50;
};

namespace detail {

struct Panel {
    double a, b, fa, fm, fb, whole;
};

template <class F>
double adapt(const F& f, const Panel& p, double tol, int level, int max_level)
{
    const double m = 0.5 * (p.a + p.b), h = p.b - p.a;
    const double fl = f(0.5 * (p.a + m)), fr = f(0.5 * (m + p.b));
    require(std::isfinite(fl) && std::isfinite(fr), "quadrature: integrand is not finite");
    const double left = h / 12.0 * (p.fa + 4.0 * fl + p.fm), right = h / 12.0 * (p.fm + 4.0 * fr + p.fb);
    const double diff = left + right - p.whole;
    if (level >= max_level || (level >= 2 && std::abs(diff) <= 15.0 * tol)) return left + right + diff / 15.0;
    return adapt(f, {p.a, m, p.fa, fl, p.fm, left}, 0.5 * tol, level + 1, max_level) +
           adapt(f, {m, p.b, p.fm, fr, p.fb, right}, 0.5 * tol, level + 1, max_level);
}

} // namespace detail

/// Adaptive Simpson over initial_panels equal panels. Each panel is
/// bisected at least twice, then until the Richardson estimate meets the
/// tolerance. Non-finite integrand values throw.
template <class F>
double integrate(const F& f, double a, double b, const RefinementOptions& opt = {})
{
    if (b <= a) return 0.0;
    const double h = (b - a) / static_cast<double>(opt.initial_panels);
    std::vector<double> fx(2 * opt.initial_panels + 1);
    for (std::size_t k = 0; k < fx.size(); ++k) {
        fx[k] = f(k + 1 == fx.size() ? b : a + 0.5 * h * static_cast<double>(k));
        require(std::isfinite(fx[k]), "quadrature: integrand is not finite");
    }
    double coarse = 0.0;
    for (std::size_t k = 0; k < opt.initial_panels; ++k) coarse += h / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
    const double tol = std::max(opt.rel_tol * std::abs(coarse), opt.abs_tol) / static_cast<double>(opt.initial_panels);
    double s = 0.0;
    for (std::size_t k = 0; k < opt.initial_panels; ++k) {
        const double lo = a + h * static_cast<double>(k), hi = k + 1 == opt.initial_panels ? b : lo + h;
        const double whole = (hi - lo) / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
        s += detail::adapt(f, {lo, hi, fx[2 * k], fx[2 * k + 1], fx[2 * k + 2], whole}, tol, 0, opt.max_depth);
    }
    return s;
}

/// Tensor-product version over the rectangle [ax,bx] x [ay,by].
template <class F>
double integrate_2d(const F& f, double ax, double bx, double ay, double by, const RefinementOptions& opt = {})
{
    auto inner = [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by, opt);
    };
    return integrate(inner, ax, bx, opt);
}

} // namespace nlfv::quad
