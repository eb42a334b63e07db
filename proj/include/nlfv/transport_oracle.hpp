#pragma once

// Brute-force optimal transport for small atomic measures. Solves the
// transportation linear program by successive shortest augmenting paths
// (Bellman-Ford on the residual network). Test-scale only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nlfv/error.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/measure.hpp"

namespace nlfv {

enum class TransportCost { line, torus };

inline constexpr std::size_t lp_oracle_max_atoms = 64;

inline double transport_cost(TransportCost c, double x, double y)
{
    const double d = std::abs(x - y);
    if (c == TransportCost::line) return d;
    const double r = std::fmod(d, two_pi);
    return std::min(r, two_pi - r);
}

inline double wasserstein1_lp_oracle(const std::vector<Atom>& a, const std::vector<Atom>& b, TransportCost cost)
{
    require(a.size() <= lp_oracle_max_atoms && b.size() <= lp_oracle_max_atoms,
            "wasserstein1_lp_oracle: at most 64 atoms per measure");
    double ma = 0.0, mb = 0.0;
    for (const auto& x : a) ma += x.mass;
    for (const auto& x : b) mb += x.mass;
    require(std::abs(ma - mb) <= 1e-9 * std::max(1.0, ma), "wasserstein1_lp_oracle: total masses differ");

    const std::size_t n = a.size(), m = b.size();
    std::vector<double> supply(n), demand(m);
    for (std::size_t i = 0; i < n; ++i) supply[i] = a[i].mass;
    for (std::size_t j = 0; j < m; ++j) demand[j] = b[j].mass;
    std::vector<double> c(n * m), flow(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) c[i * m + j] = transport_cost(cost, a[i].location, b[j].location);

    // node ids: 0 source, 1..n supplies, n+1..n+m demands, n+m+1 sink
    const std::size_t src = 0, sink = n + m + 1, nodes = n + m + 2;
    const double inf = std::numeric_limits<double>::infinity();
    const double eps = 1e-15 * std::max(1.0, ma);
    double remaining = ma;

    for (int iter = 0; remaining > eps && iter < 100000; ++iter) {
        std::vector<double> dist(nodes, inf);
        std::vector<long> pred(nodes, -1);
        dist[src] = 0.0;
        for (std::size_t round = 0; round < nodes; ++round) {
            bool changed = false;
            auto relax = [&](std::size_t u, std::size_t v, double w) {
                if (dist[u] + w < dist[v] - 1e-15) {
                    dist[v] = dist[u] + w;
                    pred[v] = static_cast<long>(u);
                    changed = true;
                }
            };
            for (std::size_t i = 0; i < n; ++i)
                if (supply[i] > eps) relax(src, 1 + i, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (dist[1 + i] == inf) continue;
                for (std::size_t j = 0; j < m; ++j) relax(1 + i, 1 + n + j, c[i * m + j]);
            }
            for (std::size_t j = 0; j < m; ++j) {
                if (dist[1 + n + j] == inf) continue;
                for (std::size_t i = 0; i < n; ++i)
                    if (flow[i * m + j] > eps) relax(1 + n + j, 1 + i, -c[i * m + j]);
                if (demand[j] > eps) relax(1 + n + j, sink, 0.0);
            }
            if (!changed) break;
        }
        if (dist[sink] == inf) break;

        // bottleneck along the path
        double push = inf;
        for (std::size_t v = sink; v != src;) {
            const auto u = static_cast<std::size_t>(pred[v]);
            if (u == src) push = std::min(push, supply[v - 1]);
            else if (v == sink) push = std::min(push, demand[u - 1 - n]);
            else if (u > n) push = std::min(push, flow[(v - 1) * m + (u - 1 - n)]);
            v = u;
        }
        for (std::size_t v = sink; v != src;) {
            const auto u = static_cast<std::size_t>(pred[v]);
            if (u == src) supply[v - 1] -= push;
            else if (v == sink) demand[u - 1 - n] -= push;
            else if (u <= n) flow[(u - 1) * m + (v - 1 - n)] += push;
            else flow[(v - 1) * m + (u - 1 - n)] -= push;
            v = u;
        }
        remaining -= push;
    }

    double total = 0.0;
    for (std::size_t k = 0; k < n * m; ++k) total += flow[k] * c[k];
    return total;
}

inline std::vector<Atom> atoms_of(const Measure1D& m)
{
    std::vector<Atom> out;
    for (std::size_t i = 0; i < m.masses.size(); ++i)
        if (m.masses[i] != 0.0) out.push_back({m.grid.center(i), m.masses[i]});
    return out;
}

inline double wasserstein1_lp_oracle(const Measure1D& a, const Measure1D& b, TransportCost cost)
{
    return wasserstein1_lp_oracle(atoms_of(a), atoms_of(b), cost);
}

} // namespace nlfv
