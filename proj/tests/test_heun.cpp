#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "helix/heun.hpp"
#include "helix/spectrum.hpp"

using namespace helix;

namespace {

// Taylor coefficients from z(z-1) times the ODE, collected power by power:
//   (s+1)(s+beta+1) c_{s+1} = [s(s-1) - alpha s + (beta+gamma+2) s - mu] c_s
//                             + [alpha (s-1) + mu + nu] c_{s-1}
std::vector<double> taylor_oracle(const HeunParams& p, std::size_t count)
{
    std::vector<double> c{1.0};
    const double mu = p.mu();
    const double nu = p.nu();
    for (std::size_t k = 0; c.size() < count; ++k) {
        const double s = static_cast<double>(k);
        const double cm1 = k >= 1 ? c[k - 1] : 0.0;
        const double rhs = (s * (s - 1.0) - p.alpha * s + (p.beta + p.gamma + 2.0) * s - mu) * c[k]
                           + (p.alpha * (s - 1.0) + mu + nu) * cm1;
        c.push_back(rhs / ((s + 1.0) * (s + p.beta + 1.0)));
    }
    return c;
}

HeunParams ground_params(int m)
{
    const SpectrumLine line = ground_state({1.0, 1.0}, m, 1.0, 1.0);
    return heun_parameters(line_model(line), line.energy).heun;
}

HeunParams random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    HeunParams p;
    do {
        p = {u(rng), u(rng), u(rng), u(rng), u(rng)};
    } while (std::abs(p.beta + 1.0) < 1e-3 || std::abs(p.beta + 2.0) < 1e-3);
    return p;
}

} // namespace

TEST(Recurrence, SingleTerm)
{
    const auto s = series_coefficients({0.3, -0.5, 1.1, 0.2, 0.4}, 1);
    ASSERT_EQ(s.coeffs.size(), 1u);
    EXPECT_EQ(s.coeffs[0], 1.0);
}

TEST(Recurrence, AllZeroParameters)
{
    const auto t = recurrence_terms({}, 1);
    EXPECT_EQ(t.a, 1.0);
    EXPECT_EQ(t.b, 0.0);
    const auto s = series_coefficients({}, 2);
    EXPECT_EQ(s.coeffs[1], 0.0);
}

TEST(Recurrence, MatchesTaylorOracle)
{
    std::mt19937_64 rng(7);
    for (int draw = 0; draw < 50; ++draw) {
        const HeunParams p = random_params(rng);
        const auto lib = series_coefficients(p, 30).coeffs;
        const auto ref = taylor_oracle(p, 30);
        for (std::size_t s = 0; s < lib.size(); ++s) {
            EXPECT_NEAR(lib[s], ref[s], 1e-11 * std::max(1.0, std::abs(ref[s]))) << "s=" << s;
        }
    }
}

TEST(Recurrence, GroundLineTerminatesAfterConstant)
{
    const auto s = series_coefficients(ground_params(2), 12);
    double vmax = 0.0;
    for (double v : s.coeffs) {
        vmax = std::max(vmax, std::abs(v));
    }
    for (std::size_t k = 1; k < s.coeffs.size(); ++k) {
        EXPECT_LE(std::abs(s.coeffs[k]), 1e-10 * vmax) << "k=" << k;
    }
    ASSERT_TRUE(s.polynomial_degree);
    EXPECT_EQ(*s.polynomial_degree, 0);
}

TEST(Recurrence, BreakdownWhenBetaIsNegativeInteger)
{
    try {
        (void)series_coefficients({0.1, -1.0, 0.3, 0.2, 0.5}, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RecurrenceBreakdown);
    }
}

TEST(IsPolynomial, QuantisedParametersTerminate)
{
    for (int m : {0, 2, 3}) {
        const auto deg = is_polynomial(ground_params(m));
        ASSERT_TRUE(deg) << "m=" << m;
        EXPECT_LE(*deg, 1);
    }
}

TEST(IsPolynomial, GenericParametersDoNot)
{
    std::mt19937_64 rng(11);
    for (int draw = 0; draw < 100; ++draw) {
        EXPECT_FALSE(is_polynomial(random_params(rng)));
    }
}

TEST(IsPolynomial, FirstConditionAloneIsNotEnough)
{
    HeunParams p = ground_params(2);
    p.eta += 0.1;
    EXPECT_FALSE(is_polynomial(p));
}

TEST(IsPolynomial, DegreeOneLine)
{
    const auto [lo, hi] = n1_spectrum({1.0, 1.0}, 2, 1.0, 1.0);
    for (const auto& line : {lo, hi}) {
        const auto p = heun_parameters(line_model(line), line.energy).heun;
        const auto deg = is_polynomial(p);
        ASSERT_TRUE(deg);
        EXPECT_EQ(*deg, 1);
    }
}

TEST(IsPolynomial, RejectsZeroBudget)
{
    EXPECT_THROW((void)is_polynomial({}, 0), Error);
}

TEST(Evaluate, OriginIsOneBySeries)
{
    const auto v = heunc_eval({0.3, -0.5, 1.1, 0.2, 0.4}, 0.0);
    EXPECT_EQ(v.value, 1.0);
    EXPECT_EQ(v.method, HeunMethod::series);
}

TEST(Evaluate, SeriesAndContinuationAgreeNearTheRadius)
{
    const HeunParams p{0.3, -0.5, 1.1, 0.2, 0.4};
    const auto s = heunc_series(p, -0.9);
    const auto c = heunc_continue(p, -0.9);
    EXPECT_EQ(c.method, HeunMethod::continuation);
    EXPECT_NEAR(c.value, s.value, 1e-9 * std::abs(s.value));
    EXPECT_NEAR(c.derivative, s.derivative, 1e-8 * std::max(1.0, std::abs(s.derivative)));
}

TEST(Evaluate, PolynomialFarOutsideTheSeriesDisc)
{
    const HeunParams p = ground_params(3);
    const auto poly = heunc_eval(p, -25.0);
    EXPECT_EQ(poly.method, HeunMethod::polynomial);
    EXPECT_TRUE(std::isfinite(poly.value));
    // the polynomial is the recessive solution on the negative axis, so the
    // integrator can only follow it over a few units before the growing one takes over
    const auto cont = heunc_continue(p, -3.0);
    EXPECT_NEAR(cont.value, heunc_eval(p, -3.0).value, 1e-8);

    const auto [lo, hi] = n1_spectrum({1.0, 1.0}, 4, 1.0, 1.0);
    const HeunParams q = heun_parameters(line_model(hi), hi.energy).heun;
    const auto p5 = heunc_eval(q, -5.0);
    EXPECT_EQ(p5.method, HeunMethod::polynomial);
    const auto c5 = heunc_continue(q, -5.0);
    EXPECT_NEAR(c5.value, p5.value, 1e-8 * std::max(1.0, std::abs(p5.value)));
}

TEST(Evaluate, ManyMatchesSingle)
{
    const HeunParams p{0.3, -0.5, 1.1, 0.2, 0.4};
    const std::vector<double> zs{-3.0, -0.2, 0.6, -0.8, 0.9, -1.5, 0.0};
    const auto many = heunc_eval_many(p, zs);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const auto one = heunc_eval(p, zs[i]);
        EXPECT_NEAR(many[i].value, one.value, 1e-9 * std::max(1.0, std::abs(one.value)));
        EXPECT_EQ(many[i].method, one.method);
    }
}

TEST(Evaluate, SingularPointsAreRejected)
{
    const HeunParams p{0.3, -0.5, 1.1, 0.2, 0.4};
    EXPECT_THROW((void)heunc_continue(p, 1.0), Error);
    EXPECT_THROW((void)heunc_continue(p, 1.5), Error);
    EXPECT_THROW((void)heunc_series(p, -1.0), Error);
    try {
        (void)heunc_eval(p, 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularPath);
    }
}

TEST(Residual, SeriesSolutionSatisfiesTheEquation)
{
    const HeunParams p{0.3, -0.5, 1.1, 0.2, 0.4};
    const auto v = heunc_series(p, 0.3);
    EXPECT_LT(ode_residual(p, 0.3, v.value, v.derivative, v.second_derivative), 1e-10);
}

TEST(Residual, TrivialFunctions)
{
    const HeunParams p{0.3, -0.5, 1.1, 0.2, 0.4};
    EXPECT_EQ(ode_residual(p, 0.4, 0.0, 0.0, 0.0), 0.0);
    const double expected = std::abs(p.mu() / 0.4 + p.nu() / (0.4 - 1.0));
    EXPECT_NEAR(ode_residual(p, 0.4, 1.0, 0.0, 0.0), expected, 1e-15);
    EXPECT_GT(expected, 0.0);
    EXPECT_THROW((void)ode_residual(p, 0.0, 1.0, 0.0, 0.0), Error);
    EXPECT_THROW((void)ode_residual(p, 1.0, 1.0, 0.0, 0.0), Error);
}

TEST(Residual, RandomDrawsInsideTheSeriesDisc)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> zdist(-0.9, 0.7);
    for (int draw = 0; draw < 200; ++draw) {
        const HeunParams p = random_params(rng);
        double z = zdist(rng);
        if (std::abs(z) < 1e-3) {
            z = 0.1;
        }
        const auto v = heunc_eval(p, z);
        EXPECT_LT(relative_ode_residual(p, z, v.value, v.derivative, v.second_derivative), 1e-8)
            << "draw " << draw << " z=" << z;
    }
}
