#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlfv/invariants.hpp"
#include "nlfv/particles.hpp"

using namespace nlfv;

TEST(ParticleRhs, ClosedFormCases)
{
    const KuramotoIdentical f{1.0};
    EXPECT_EQ(particle_rhs(ParticleSystem{{1.3}, {1.0}}, f)[0], 0.0);

    const auto anti = particle_rhs(ParticleSystem{{0.4, 0.4 + pi}, {0.5, 0.5}}, f);
    EXPECT_NEAR(anti[0], 0.0, 1e-15);
    EXPECT_NEAR(anti[1], 0.0, 1e-15);

    // separation pi/2: the particles attract with speed sin(pi/2) / 2
    const auto v = particle_rhs(ParticleSystem{{1.0, 1.0 + pi / 2}, {0.5, 0.5}}, f);
    EXPECT_NEAR(v[0], 0.5, 1e-15);
    EXPECT_NEAR(v[1], -0.5, 1e-15);
}

TEST(Rk4, ZeroFieldLeavesPositionsUnchanged)
{
    const ParticleSystem ps{{0.1, 2.0, 5.0}, {0.2, 0.3, 0.5}};
    const auto out = rk4_run(ps, KuramotoIdentical{0.0}, 1.0, 0.01);
    EXPECT_EQ(out.positions, ps.positions);
    EXPECT_EQ(out.masses, ps.masses);
}

TEST(Rk4, RejectsStepAboveStabilityMargin)
{
    const ParticleSystem ps{{0.1, 2.0}, {0.5, 0.5}};
    EXPECT_THROW(rk4_run(ps, KuramotoIdentical{1.0}, 1.0, 0.2), InvalidInput);
}

TEST(Rk4, TwoParticleSeparationMatchesClosedForm)
{
    for (double s0 : {0.5, 1.5, 2.5}) {
        const double k = 1.0, t = 0.5;
        const auto out = rk4_run(ParticleSystem{{pi - s0 / 2, pi + s0 / 2}, {0.5, 0.5}}, KuramotoIdentical{k}, t, 1e-3);
        const double exact = 2.0 * std::atan(std::tan(s0 / 2) * std::exp(-k * t));
        EXPECT_NEAR(out.positions[1] - out.positions[0], exact, 1e-8);
        EXPECT_NEAR(out.positions[0] + out.positions[1], 2 * pi, 1e-12);
    }
}

// Successive differences of dt, dt/2, dt/4 runs shrink by about 2^4.
TEST(Rk4, RichardsonRatioIsFourthOrder)
{
    const ParticleSystem ps{{0.3, 1.1, 2.9, 4.0}, {0.1, 0.4, 0.3, 0.2}};
    const KuramotoIdentical f{1.0};
    auto run = [&](double dt) { return rk4_run(ps, f, 1.0, dt).positions; };
    const auto a = run(0.1), b = run(0.05), c = run(0.025);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        d1 = std::max(d1, std::abs(a[i] - b[i]));
        d2 = std::max(d2, std::abs(b[i] - c[i]));
    }
    const double ratio = d1 / d2;
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(Particles, OrderParameterGrowsInHalfCircle)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        ParticleSystem ps;
        for (int k = 0; k < 6; ++k) {
            ps.positions.push_back(0.2 + (pi - 0.4) * u(rng));
            ps.masses.push_back(1.0 / 6);
        }
        auto order = [](const ParticleSystem& p) {
            double c = 0.0, s = 0.0;
            for (std::size_t i = 0; i < p.positions.size(); ++i) {
                c += p.masses[i] * std::cos(p.positions[i]);
                s += p.masses[i] * std::sin(p.positions[i]);
            }
            return std::hypot(c, s);
        };
        double previous = order(ps);
        for (int step = 0; step < 20; ++step) {
            ps = rk4_run(ps, KuramotoIdentical{1.0}, 0.05, 0.01);
            const double r = order(ps);
            EXPECT_GE(r, previous - 1e-14);
            previous = r;
        }
    }
}

TEST(CompareToGrid, AtomsAtCentresVersusProjection)
{
    const auto g = Grid1D::torus(32);
    const ParticleSystem ps{{g.center(3), g.center(20)}, {0.25, 0.75}};
    InitialDatum d;
    d.atoms = ps.atoms();
    EXPECT_NEAR(compare_to_grid(ps, project_hat(d, g)), 0.0, 1e-15);
}

TEST(CompareToGrid, ProjectionMovesMassAtMostHalfACell)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    const auto g = Grid1D::torus(64);
    for (int trial = 0; trial < 30; ++trial) {
        const ParticleSystem ps{{u(rng), u(rng), u(rng), u(rng)}, {0.25, 0.25, 0.25, 0.25}};
        InitialDatum d;
        d.atoms = ps.atoms();
        EXPECT_LE(compare_to_grid(ps, project_hat(d, g)), 0.5 * g.dx() + 1e-15);
    }
}

TEST(CompareToGrid, RejectsMassMismatch)
{
    const auto g = Grid1D::torus(8);
    const Measure1D m{g, std::vector<double>(8, 0.1)};
    EXPECT_THROW(compare_to_grid(ParticleSystem{{1.0}, {1.0}}, m), InvalidInput);
}

TEST(CrossCheck, FiniteVolumeConvergesToParticleSolution)
{
    const auto e = particle_cross_errors({64, 128, 256, 512});
    for (std::size_t i = 1; i < e.size(); ++i) EXPECT_LT(e[i], e[i - 1]);
    EXPECT_GE(e[1] / e[3], 2.0);
}
