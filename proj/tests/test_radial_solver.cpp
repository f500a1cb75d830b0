#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "helix/radial_solver.hpp"

using namespace helix;

namespace {

ModelParams oscillator() { return {1.0, 0.0, 1.0, 0, {1.0, 1.0}}; }

// <p^4> of the n-th oscillator level with hbar = M = Omega = 1.
double p4(int n) { return 0.75 * (2.0 * n * n + 2.0 * n + 1.0); }

} // namespace

TEST(RadialGrid, SymmetricAbscissae)
{
    const RadialGrid g{12.0, 6001};
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(g.rho(0), -12.0);
    EXPECT_EQ(g.rho(6000), 12.0);
    EXPECT_EQ(g.rho(3000), 0.0);
    for (std::size_t i = 0; i < 6001; ++i) {
        EXPECT_EQ(g.rho(i), -g.rho(6000 - i));
    }
    EXPECT_THROW((RadialGrid{1.0, 6000}.validate()), Error);
    EXPECT_THROW((RadialGrid{0.0, 11}.validate()), Error);
}

TEST(RadialGrid, DefaultWidthFollowsTheGaussian)
{
    EXPECT_EQ(default_grid(1.0).half_width, 12.0);
    EXPECT_NEAR(default_grid(0.04).half_width, 30.0, 1e-12);
    EXPECT_EQ(default_grid(0.04).points, 6001u);
}

TEST(Discretize, FlatOscillatorOperator)
{
    const RadialGrid g{10.0, 2001};
    const auto op = discretize(oscillator(), g);
    const double h = g.spacing();
    ASSERT_EQ(op.diagonal.size(), 1999u);
    EXPECT_NEAR(op.off_diagonal, -0.5 / (h * h), 1e-9);
    EXPECT_NEAR(op.diagonal[999], 1.0 / (h * h), 1e-9);
    EXPECT_NEAR(op.diagonal[0], 1.0 / (h * h) + 0.5 * g.rho(1) * g.rho(1), 1e-9);
}

TEST(Discretize, DiagonalIsEvenAndHasOffCentreWells)
{
    const ModelParams p{1.0, 1.0, 1.0, 2, {1.0, 1.0}};
    const RadialGrid g{12.0, 6001};
    const auto op = discretize(p, g);
    const std::size_t n = op.diagonal.size();
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(op.diagonal[i], op.diagonal[n - 1 - i]);
    }
    const auto it = std::min_element(op.diagonal.begin(), op.diagonal.end());
    const double rho_min = g.rho(static_cast<std::size_t>(it - op.diagonal.begin()) + 1);
    EXPECT_NEAR(std::abs(rho_min), 0.931, g.spacing() + 1e-3);
}

TEST(LowestEigenvalues, OscillatorAtCoarseGrid)
{
    const RadialGrid g{10.0, 4001};
    const auto e = lowest_eigenvalues(discretize(oscillator(), g), 3);
    ASSERT_EQ(e.size(), 3u);
    EXPECT_NEAR(e[0], 0.5, 1e-5);
    EXPECT_NEAR(e[1], 1.5, 1e-5);
    // The third level misses 1e-5 by the second-order stencil error alone:
    // E_h - E = -h^2 <p^4> / 24 to leading order.
    const double h = g.spacing();
    const double predicted = -h * h * p4(2) / 24.0;
    EXPECT_NEAR(e[2] - 2.5, predicted, 0.02 * std::abs(predicted));
    for (int n = 0; n < 3; ++n) {
        const double pred = -h * h * p4(n) / 24.0;
        EXPECT_NEAR(e[static_cast<std::size_t>(n)] - (n + 0.5), pred, 0.02 * std::abs(pred));
    }
}

TEST(LowestEigenvalues, OscillatorAtDefaultGrid)
{
    const auto e = lowest_eigenvalues(discretize(oscillator(), {12.0, 6001}), 3);
    for (int n = 0; n < 3; ++n) {
        EXPECT_NEAR(e[static_cast<std::size_t>(n)], n + 0.5, 1e-5);
    }
}

TEST(LowestEigenvalues, FreeBox)
{
    const ModelParams p{1.0, 0.0, 0.0, 0, {1.0, 1.0}};
    const auto e = lowest_eigenvalues(discretize(p, {1.0, 4001}), 1);
    EXPECT_NEAR(e[0], std::numbers::pi * std::numbers::pi / 8.0, 1e-5);
}

TEST(LowestEigenvalues, ContainsTheGroundLine)
{
    const ModelParams p{1.0, 1.0, 0.3262379, 2, {1.0, 1.0}};
    const auto op = discretize(p, {12.0, 6001});
    EXPECT_NEAR(nearest_eigenvalue(op, 0.8541020), 0.8541020, 1e-4 * 0.8541020);
    EXPECT_THROW((void)lowest_eigenvalues(op, 0), Error);
}

TEST(LowestEigenvalues, AscendingAndConsistentWithSturmCounts)
{
    const ModelParams p{1.0, 1.0, 0.7, 3, {0.2, 0.01}};
    const auto op = discretize(p, {12.0, 3001});
    const auto e = lowest_eigenvalues(op, 6);
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (k) {
            EXPECT_LT(e[k - 1], e[k]);
        }
        EXPECT_EQ(sturm_count(op, e[k] - 1e-7), k);
        EXPECT_EQ(sturm_count(op, e[k] + 1e-7), k + 1);
    }
}

TEST(LowestEigenvalues, SecondOrderConvergence)
{
    const ModelParams p{1.0, 1.0, 1.0, 4, {1.0, 1.0}};
    std::vector<std::vector<double>> e;
    for (std::size_t n : {751u, 1501u, 3001u}) {
        e.push_back(lowest_eigenvalues(discretize(p, {12.0, n}), 3));
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const double ratio = (e[0][k] - e[1][k]) / (e[1][k] - e[2][k]);
        EXPECT_GE(ratio, 3.5);
        EXPECT_LE(ratio, 4.5);
    }
}

TEST(LowestEigenvalues, InsensitiveToBoxWidthAtFixedSpacing)
{
    const ModelParams p{1.0, 1.0, 1.0, 2, {1.0, 1.0}};
    const auto base = lowest_eigenvalues(discretize(p, {12.0, 6001}), 3);
    const auto wide = lowest_eigenvalues(discretize(p, {15.0, 7501}), 3);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(base[k], wide[k], 1e-8);
    }
}

TEST(Eigenfunction, OscillatorParityAndNodes)
{
    const auto op = discretize(oscillator(), {10.0, 2001});
    const auto e = lowest_eigenvalues(op, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto pair = eigenfunction(op, e[k]);
        ASSERT_TRUE(pair.parity);
        EXPECT_EQ(*pair.parity, k % 2 == 0 ? Parity::even : Parity::odd);
        EXPECT_EQ(pair.nodes, static_cast<int>(k));
        EXPECT_LE(pair.residual, 1e-8);
        EXPECT_NEAR(pair.energy, e[k], 1e-9);
    }
}

TEST(Eigenfunction, HelicoidParityAlternationAndNodes)
{
    const ModelParams p{1.0, 1.0, 1.0, 4, {1.0, 1.0}};
    const auto op = discretize(p, {12.0, 3001});
    const auto e = lowest_eigenvalues(op, 6);
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto pair = eigenfunction(op, e[k]);
        ASSERT_TRUE(pair.parity) << "k=" << k;
        // the two ring wells make the lowest states come in near-degenerate even/odd pairs
        EXPECT_EQ(*pair.parity, k % 2 == 0 ? Parity::even : Parity::odd) << "k=" << k;
        EXPECT_EQ(pair.nodes, static_cast<int>(k)) << "k=" << k;
    }
}

TEST(Eigenfunction, NotAnEigenvalue)
{
    const auto op = discretize(oscillator(), {10.0, 1001});
    try {
        (void)eigenfunction(op, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAnEigenvalue);
    }
}

TEST(Eigenfunction, GroundLineMatchesTheEvenClosedForm)
{
    const auto line = ground_state({1, 1}, 2, 1.0);
    const ModelParams p = line_model(line);
    const RadialGrid g{12.0, 6001};
    const auto op = discretize(p, g);
    const auto pair = eigenfunction(op, nearest_eigenvalue(op, line.energy));
    ASSERT_TRUE(pair.parity);
    EXPECT_EQ(*pair.parity, Parity::even);

    // same samples, compared after matching norms and signs
    const auto closed = radial_wavefunction(p, line, Parity::even, g.interior());
    double dot = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < closed.f.size(); ++i) {
        dot += closed.f[i] * pair.vector[i];
        nn += closed.f[i] * closed.f[i];
    }
    EXPECT_NEAR(std::abs(dot) / std::sqrt(nn), 1.0, 1e-6);
    EXPECT_LT(radial_equation_residual(p, line.energy, closed), 1e-6);
}
