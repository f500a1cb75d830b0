#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "helix/geometry.hpp"

using namespace helix;

TEST(Embed, AxisPointsLieOnTheZAxis)
{
    const Vec3 r = embed({1.0}, {0.0, 5.0});
    EXPECT_DOUBLE_EQ(r[0], 0.0);
    EXPECT_DOUBLE_EQ(r[1], 0.0);
    EXPECT_DOUBLE_EQ(r[2], 5.0);
}

TEST(Embed, ZeroPhaseIsAlongX)
{
    const Vec3 r = embed({1.0}, {2.0, 0.0});
    EXPECT_DOUBLE_EQ(r[0], 2.0);
    EXPECT_DOUBLE_EQ(r[1], 0.0);
    EXPECT_DOUBLE_EQ(r[2], 0.0);
}

TEST(Embed, QuarterTurnFromTwistCount)
{
    const auto h = HelicoidParams::from_twists(0.5);
    EXPECT_DOUBLE_EQ(h.twists(), 0.5);
    const Vec3 r = embed(h, {1.0, 0.25});
    EXPECT_NEAR(r[0], std::cos(std::numbers::pi / 4), 1e-15);
    EXPECT_NEAR(r[1], std::sin(std::numbers::pi / 4), 1e-15);
    EXPECT_DOUBLE_EQ(r[2], 0.25);
}

TEST(Embed, ArcLengthAlongRhoLinesEqualsDeltaRho)
{
    const HelicoidParams h{1.7};
    const Vec3 a = embed(h, {0.3, 0.9});
    const Vec3 b = embed(h, {1.55, 0.9});
    const Vec3 d = detail::sub(b, a);
    EXPECT_NEAR(std::sqrt(detail::dot(d, d)), 1.25, 1e-14);
}

TEST(Metric, DiagonalValues)
{
    const auto at_axis = metric({1.0}, 0.0);
    EXPECT_DOUBLE_EQ(at_axis.g_rho_rho, 1.0);
    EXPECT_DOUBLE_EQ(at_axis.g_z_z, 1.0);
    EXPECT_DOUBLE_EQ(at_axis.g_rho_z, 0.0);

    const auto flat = metric({0.0}, 3.7);
    EXPECT_DOUBLE_EQ(flat.g_z_z, 1.0);

    const auto g = metric({1.0}, 2.0);
    EXPECT_DOUBLE_EQ(g.g_rho_rho, 1.0);
    EXPECT_DOUBLE_EQ(g.g_z_z, 5.0);
}

TEST(Metric, DeterminantIsOnePlusOmegaSquaredRhoSquared)
{
    for (double w : {0.0, 0.5, 1.0, 2.0}) {
        for (double rho = -5.0; rho <= 5.0; rho += 0.25) {
            EXPECT_DOUBLE_EQ(metric({w}, rho).determinant(), 1.0 + w * w * rho * rho);
        }
    }
}

TEST(PrincipalCurvatures, ValuesAtSamplePoints)
{
    const auto c0 = principal_curvatures({1.0}, 0.0);
    EXPECT_DOUBLE_EQ(c0.kappa1, 1.0);
    EXPECT_DOUBLE_EQ(c0.kappa2, -1.0);
    EXPECT_DOUBLE_EQ(c0.mean, 0.0);
    EXPECT_DOUBLE_EQ(c0.gaussian, -1.0);

    const auto plane = principal_curvatures({0.0}, 3.0);
    EXPECT_DOUBLE_EQ(plane.kappa1, 0.0);
    EXPECT_DOUBLE_EQ(plane.kappa2, 0.0);
    EXPECT_DOUBLE_EQ(plane.gaussian, 0.0);

    const auto c2 = principal_curvatures({1.0}, 2.0);
    EXPECT_DOUBLE_EQ(c2.kappa1, 0.2);
    EXPECT_DOUBLE_EQ(c2.kappa2, -0.2);
    EXPECT_NEAR(c2.gaussian, -0.04, 1e-17);
}

TEST(PrincipalCurvatures, MeanCurvatureVanishesIdentically)
{
    for (double w : {0.5, 1.0, 2.0, 7.3}) {
        for (double rho = -5.0; rho <= 5.0; rho += 0.1) {
            EXPECT_EQ(principal_curvatures({w}, rho).mean, 0.0);
        }
    }
}

TEST(GeometricPotential, SampleValues)
{
    EXPECT_DOUBLE_EQ(geometric_potential({1.0}, 1.0, 1.0, 0.0), -0.5);
    EXPECT_DOUBLE_EQ(geometric_potential({0.0}, 1.0, 1.0, 1.0), 0.0);
    EXPECT_NEAR(geometric_potential({1.0}, -0.01, 1.0, 0.0), 50.0, 1e-12);
}

TEST(GeometricPotential, ZeroNormalMassThrows)
{
    try {
        (void)geometric_potential({1.0}, 0.0, 1.0, 0.5);
        FAIL() << "expected ZeroMass";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroMass);
    }
}

TEST(GeometricPotential, EvenNonpositiveAndRisingInAbsRho)
{
    const HelicoidParams h{1.3};
    double prev = geometric_potential(h, 0.7, 1.0, 0.0);
    EXPECT_LE(prev, 0.0);
    for (double rho = 0.05; rho <= 6.0; rho += 0.05) {
        const double v = geometric_potential(h, 0.7, 1.0, rho);
        EXPECT_EQ(v, geometric_potential(h, 0.7, 1.0, -rho));
        EXPECT_LE(v, 0.0);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(NumericCurvatures, HelicoidIsMinimal)
{
    const auto c = numeric_curvatures(HelicoidParams{1.0}, {0.7, 0.3}, 1e-4);
    EXPECT_NEAR(c.mean, 0.0, 1e-6);
}

TEST(NumericCurvatures, PlaneIsFlat)
{
    const auto plane = [](double u, double v) { return Vec3{u, v, 0.3 * u - 2.0 * v + 1.0}; };
    for (const SurfaceCoords p : {SurfaceCoords{0.0, 0.0}, SurfaceCoords{-2.0, 3.5}}) {
        const auto c = numeric_curvatures(plane, p);
        EXPECT_NEAR(c.kappa1, 0.0, 1e-7);
        EXPECT_NEAR(c.kappa2, 0.0, 1e-7);
    }
}

TEST(NumericCurvatures, SphereOfRadiusTwo)
{
    const double R = 2.0;
    const auto sphere = [R](double theta, double phi) {
        return Vec3{R * std::sin(theta) * std::cos(phi), R * std::sin(theta) * std::sin(phi),
                    R * std::cos(theta)};
    };
    for (const SurfaceCoords p : {SurfaceCoords{0.4, 0.1}, SurfaceCoords{1.2, -2.0},
                                  SurfaceCoords{2.5, 4.0}}) {
        const auto c = numeric_curvatures(sphere, p);
        EXPECT_NEAR(c.gaussian, 0.25, 1e-6);
        EXPECT_NEAR(std::abs(c.mean), 0.5, 1e-6);
    }
}

TEST(NumericCurvatures, DegeneratePointThrows)
{
    // the polar point of the sphere parametrisation is not an immersion
    const auto sphere = [](double theta, double phi) {
        return Vec3{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                    std::cos(theta)};
    };
    try {
        (void)numeric_curvatures(sphere, {0.0, 0.0});
        FAIL() << "expected DegenerateMetric";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateMetric);
    }
}

TEST(NumericCurvatures, NonPositiveStepThrows)
{
    EXPECT_THROW((void)numeric_curvatures(HelicoidParams{1.0}, {0.1, 0.1}, 0.0), Error);
}

TEST(NumericCurvatures, MatchAnalyticOverTheRibbon)
{
    for (double w : {0.5, 1.0, 2.0}) {
        for (double rho = -5.0; rho <= 5.0; rho += 0.5) {
            const auto num = numeric_curvatures(HelicoidParams{w}, {rho, 0.37});
            const auto ana = principal_curvatures({w}, rho);
            EXPECT_NEAR(num.kappa1, ana.kappa1, 1e-6) << "w=" << w << " rho=" << rho;
            EXPECT_NEAR(num.kappa2, ana.kappa2, 1e-6) << "w=" << w << " rho=" << rho;
            EXPECT_NEAR(num.gaussian, ana.gaussian, 1e-6);
            EXPECT_NEAR(num.mean, 0.0, 1e-6);
        }
    }
}
