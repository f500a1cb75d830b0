#pragma once

/** \file heun.hpp
 *
 *  \brief Confluent Heun functions HeunC(alpha, beta, gamma, delta, eta; z).
 *
 *  The function is the solution regular at z = 0 with Phi(0) = 1 of
 *
 *      Phi'' + (alpha + (beta+1)/z + (gamma+1)/(z-1)) Phi' + (mu/z + nu/(z-1)) Phi = 0,
 *
 *  with mu and nu the accessory combinations below. Inside the unit disc it is
 *  summed from the three-term recurrence; outside |z| <= 0.75 it is continued
 *  along the real axis by integrating the ODE; terminating parameter sets are
 *  evaluated as polynomials everywhere.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "helix/errors.hpp"

namespace helix {

struct HeunParams
{
    double alpha{0.0};
    double beta{0.0};
    double gamma{0.0};
    double delta{0.0};
    double eta{0.0};

    [[nodiscard]] double mu() const
    {
        return 0.5 * (alpha - beta - gamma + alpha * beta - beta * gamma) - eta;
    }

    [[nodiscard]] double nu() const
    {
        return 0.5 * (alpha + beta + gamma + alpha * gamma + beta * gamma) + delta + eta;
    }
};

/// Recurrence weights for A_s v_s = B_s v_{s-1} + C_s v_{s-2}.
struct RecurrenceTerms
{
    double a;
    double b;
    double c;
};

/// The running index s appears in every weight (the 1/s^2 and s - 1 pieces included).
[[nodiscard]] inline RecurrenceTerms recurrence_terms(const HeunParams& p, int s)
{
    const double sd = static_cast<double>(s);
    const double a = 1.0 + p.beta / sd;
    const double b = 1.0 + (p.beta + p.gamma - p.alpha - 1.0) / sd
                     + (p.eta - 0.5 * (p.beta + p.gamma - p.alpha) - 0.5 * p.alpha * p.beta
                        + 0.5 * p.beta * p.gamma)
                           / (sd * sd);
    // alpha (delta/alpha + (beta+gamma)/2 + s - 1) / s^2, written without dividing by alpha
    const double c = (p.delta + p.alpha * (0.5 * (p.beta + p.gamma) + sd - 1.0)) / (sd * sd);
    return {a, b, c};
}

struct HeunSeries
{
    HeunParams params;
    std::vector<double> coeffs;
    std::optional<int> polynomial_degree;

    [[nodiscard]] std::size_t truncation() const { return coeffs.size(); }
};

namespace detail {

/// Appends coefficients until `coeffs` holds `count` entries; coeffs must start as {1}.
inline void extend_coefficients(const HeunParams& p, std::vector<double>& coeffs, std::size_t count)
{
    while (coeffs.size() < count) {
        const int s = static_cast<int>(coeffs.size());
        const RecurrenceTerms t = recurrence_terms(p, s);
        if (t.a == 0.0) {
            throw Error(ErrorCode::RecurrenceBreakdown, "A_s vanishes (beta = -s)");
        }
        const double prev = coeffs[static_cast<std::size_t>(s - 1)];
        const double prev2 = s >= 2 ? coeffs[static_cast<std::size_t>(s - 2)] : 0.0;
        const double next = (t.b * prev + t.c * prev2) / t.a;
        if (!std::isfinite(next)) {
            throw Error(ErrorCode::RecurrenceBreakdown, "series coefficient overflowed");
        }
        coeffs.push_back(next);
    }
}

/// Smallest s0 >= 1 with |v_s0|, |v_s0+1| <= tol * max_{s<s0} |v_s|; returns s0 - 1.
inline std::optional<int> detect_termination(std::span<const double> coeffs, int max_degree, double tol)
{
    double running_max = 0.0;
    for (int s0 = 1; s0 <= max_degree + 1; ++s0) {
        const auto idx = static_cast<std::size_t>(s0);
        if (idx + 1 >= coeffs.size()) {
            break;
        }
        running_max = std::max(running_max, std::abs(coeffs[idx - 1]));
        const double bound = tol * running_max;
        if (std::abs(coeffs[idx]) <= bound && std::abs(coeffs[idx + 1]) <= bound) {
            return s0 - 1;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// First `n_terms` coefficients v_0 .. v_{n_terms-1}, with v_{-1} = 0 and v_0 = 1.
[[nodiscard]] inline HeunSeries series_coefficients(const HeunParams& p, std::size_t n_terms,
                                                    double poly_tol = 1e-10)
{
    if (n_terms < 1) {
        throw Error(ErrorCode::InvalidArgument, "at least one series term is required");
    }
    HeunSeries series{p, {1.0}, std::nullopt};
    series.coeffs.reserve(n_terms);
    detail::extend_coefficients(p, series.coeffs, n_terms);
    if (n_terms >= 3) {
        series.polynomial_degree = detail::detect_termination(
            series.coeffs, static_cast<int>(n_terms) - 3, poly_tol);
    }
    return series;
}

/// Degree of the Heun polynomial if two successive coefficients vanish, else nullopt.
[[nodiscard]] inline std::optional<int> is_polynomial(const HeunParams& p, int max_degree = 64,
                                                      double tol = 1e-10)
{
    if (max_degree < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_degree must be at least 1");
    }
    std::vector<double> coeffs{1.0};
    try {
        detail::extend_coefficients(p, coeffs, static_cast<std::size_t>(max_degree) + 3);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::RecurrenceBreakdown) {
            return std::nullopt;
        }
        throw;
    }
    return detail::detect_termination(coeffs, max_degree, tol);
}

enum class HeunMethod { series, continuation, polynomial };

constexpr std::string_view to_string(HeunMethod m)
{
    switch (m) {
    case HeunMethod::series: return "series";
    case HeunMethod::continuation: return "continuation";
    case HeunMethod::polynomial: return "polynomial";
    }
    return "unknown";
}

struct HeunValue
{
    double value{0.0};
    double derivative{0.0};
    double second_derivative{0.0};
    HeunMethod method{HeunMethod::series};
    /// Sum of |v_s z^s| for series and polynomial values; |value| for continuation.
    double magnitude{0.0};
};

struct HeunOptions
{
    double series_radius{0.75};
    double series_tol{1e-14};
    std::size_t max_terms{512};
    double continuation_start{0.5};
    double rel_tol{1e-10};
    double abs_tol{1e-14};
    double poly_tol{1e-10};
    int max_poly_degree{64};
};

/// P(z) and Q(z) in Phi'' + P Phi' + Q Phi = 0.
[[nodiscard]] inline std::array<double, 2> ode_coefficients(const HeunParams& p, double z)
{
    const double P = p.alpha + (p.beta + 1.0) / z + (p.gamma + 1.0) / (z - 1.0);
    const double Q = p.mu() / z + p.nu() / (z - 1.0);
    return {P, Q};
}

[[nodiscard]] inline double ode_residual(const HeunParams& p, double z, double f, double df,
                                         double d2f)
{
    if (z == 0.0 || z == 1.0) {
        throw Error(ErrorCode::SingularArgument, "z is a regular singular point");
    }
    const auto [P, Q] = ode_coefficients(p, z);
    return std::abs(d2f + P * df + Q * f);
}

/// Residual divided by the size of the individual terms of the ODE.
[[nodiscard]] inline double relative_ode_residual(const HeunParams& p, double z, double f,
                                                  double df, double d2f)
{
    const double r = ode_residual(p, z, f, df, d2f);
    const auto [P, Q] = ode_coefficients(p, z);
    const double scale = std::abs(d2f) + std::abs(P * df) + std::abs(Q * f);
    return scale > 0.0 ? r / scale : r;
}

/// Power series about z = 0 with term-wise derivatives, summed to a relative tail bound.
[[nodiscard]] inline HeunValue heunc_series(const HeunParams& p, double z,
                                            const HeunOptions& opt = {})
{
    if (std::abs(z) >= 1.0) {
        throw Error(ErrorCode::NonConvergence, "series diverges for |z| >= 1");
    }
    std::vector<double> coeffs{1.0};
    coeffs.reserve(64);
    double value = 1.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double magnitude = 1.0;
    if (z == 0.0) {
        detail::extend_coefficients(p, coeffs, 3);
        return {1.0, coeffs[1], 2.0 * coeffs[2], HeunMethod::series, 1.0};
    }
    double zpow_m2 = 0.0; // z^{s-2}, unused at s = 1
    double zpow_m1 = 1.0; // z^{s-1}
    int small_run = 0;
    for (std::size_t s = 1; s < opt.max_terms; ++s) {
        detail::extend_coefficients(p, coeffs, s + 1);
        const double v = coeffs[s];
        const double sd = static_cast<double>(s);
        const double term = v * zpow_m1 * z;
        const double dterm = sd * v * zpow_m1;
        const double d2term = s >= 2 ? sd * (sd - 1.0) * v * zpow_m2 : 0.0;
        zpow_m2 = zpow_m1;
        zpow_m1 *= z;
        value += term;
        d1 += dterm;
        d2 += d2term;
        magnitude += std::abs(term);
        const double scale = std::max(std::abs(value), 1e-300);
        const bool small = std::abs(term) <= opt.series_tol * scale
                           && std::abs(dterm) <= opt.series_tol * std::max(std::abs(d1), scale)
                           && std::abs(d2term) <= opt.series_tol * std::max(std::abs(d2), scale);
        small_run = small ? small_run + 1 : 0;
        if (small_run >= 3) {
            return {value, d1, d2, HeunMethod::series, magnitude};
        }
    }
    throw Error(ErrorCode::NonConvergence, "series tail bound not reached within the term budget");
}

/// Evaluates a terminating series of the given degree as a polynomial.
[[nodiscard]] inline HeunValue heunc_polynomial(const HeunParams& p, int degree, double z)
{
    std::vector<double> coeffs{1.0};
    detail::extend_coefficients(p, coeffs, static_cast<std::size_t>(degree) + 1);
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double magnitude = 0.0;
    // Horner for value and both derivatives
    for (int s = degree; s >= 0; --s) {
        d2 = d2 * z + 2.0 * d1;
        d1 = d1 * z + value;
        value = value * z + coeffs[static_cast<std::size_t>(s)];
        magnitude += std::abs(coeffs[static_cast<std::size_t>(s)] * std::pow(z, s));
    }
    return {value, d1, d2, HeunMethod::polynomial, magnitude};
}

namespace detail {

using OdeState = std::array<double, 2>;

/// Integrates along the ray z = sign * t, t increasing from `start`, observing at each |z|.
inline std::vector<OdeState> continue_along_ray(const HeunParams& p, double sign,
                                                std::span<const double> abs_targets,
                                                const HeunOptions& opt)
{
    namespace odeint = boost::numeric::odeint;
    const double t0 = opt.continuation_start;
    const HeunValue start = heunc_series(p, sign * t0, opt);
    OdeState state{start.value, start.derivative};

    const double mu = p.mu();
    const double nu = p.nu();
    auto rhs = [&](const OdeState& y, OdeState& dydt, double t) {
        if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
            throw Error(ErrorCode::NonConvergence, "continuation overflowed");
        }
        const double z = sign * t;
        const double P = p.alpha + (p.beta + 1.0) / z + (p.gamma + 1.0) / (z - 1.0);
        const double Q = mu / z + nu / (z - 1.0);
        dydt[0] = sign * y[1];
        dydt[1] = sign * (-P * y[1] - Q * y[0]);
    };

    std::vector<double> times;
    times.reserve(abs_targets.size() + 1);
    times.push_back(t0);
    times.insert(times.end(), abs_targets.begin(), abs_targets.end());

    std::vector<OdeState> observed;
    observed.reserve(times.size());
    const double abs_tol = opt.abs_tol * (std::abs(state[0]) + std::abs(state[1]));
    auto stepper = odeint::make_dense_output(abs_tol, opt.rel_tol,
                                             odeint::runge_kutta_dopri5<OdeState>{});
    odeint::integrate_times(stepper, rhs, state, times.begin(), times.end(), 1e-3,
                            [&](const OdeState& y, double) { observed.push_back(y); });
    observed.erase(observed.begin());
    return observed;
}

} // namespace detail

/// Continues the series solution from z0 = +-0.5 to z by integrating the ODE on the real axis.
[[nodiscard]] inline HeunValue heunc_continue(const HeunParams& p, double z,
                                              const HeunOptions& opt = {})
{
    if (z >= 1.0) {
        throw Error(ErrorCode::SingularPath, "continuation path crosses the singular point z = 1");
    }
    const double sign = z < 0.0 ? -1.0 : 1.0;
    const double t = std::abs(z);
    if (t < opt.continuation_start) {
        return heunc_series(p, z, opt);
    }
    const std::array<double, 1> targets{t};
    const auto states = detail::continue_along_ray(p, sign, targets, opt);
    const auto [P, Q] = ode_coefficients(p, z);
    const double f = states.front()[0];
    const double df = states.front()[1];
    return {f, df, -P * df - Q * f, HeunMethod::continuation, std::abs(f)};
}

/// Polynomial if the parameters terminate, the series inside the series radius, otherwise continuation.
[[nodiscard]] inline HeunValue heunc_eval(const HeunParams& p, double z, const HeunOptions& opt = {})
{
    if (const auto degree = is_polynomial(p, opt.max_poly_degree, opt.poly_tol)) {
        return heunc_polynomial(p, *degree, z);
    }
    if (std::abs(z) <= opt.series_radius) {
        return heunc_series(p, z, opt);
    }
    return heunc_continue(p, z, opt);
}

/// Same as heunc_eval for many points; the continuation runs once per ray.
[[nodiscard]] inline std::vector<HeunValue> heunc_eval_many(const HeunParams& p,
                                                            std::span<const double> zs,
                                                            const HeunOptions& opt = {})
{
    std::vector<HeunValue> out(zs.size());
    if (const auto degree = is_polynomial(p, opt.max_poly_degree, opt.poly_tol)) {
        for (std::size_t i = 0; i < zs.size(); ++i) {
            out[i] = heunc_polynomial(p, *degree, zs[i]);
        }
        return out;
    }
    for (double sign : {-1.0, 1.0}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const double z = zs[i];
            if (std::abs(z) > opt.series_radius && (z < 0.0) == (sign < 0.0)) {
                if (z >= 1.0) {
                    throw Error(ErrorCode::SingularPath,
                                "continuation path crosses the singular point z = 1");
                }
                idx.push_back(i);
            }
        }
        if (idx.empty()) {
            continue;
        }
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return std::abs(zs[a]) < std::abs(zs[b]); });
        std::vector<double> targets;
        targets.reserve(idx.size());
        for (std::size_t i : idx) {
            targets.push_back(std::abs(zs[i]));
        }
        const auto states = detail::continue_along_ray(p, sign, targets, opt);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const double z = zs[idx[k]];
            const auto [P, Q] = ode_coefficients(p, z);
            const double f = states[k][0];
            const double df = states[k][1];
            out[idx[k]] = {f, df, -P * df - Q * f, HeunMethod::continuation, std::abs(f)};
        }
    }
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (std::abs(zs[i]) <= opt.series_radius) {
            out[i] = heunc_series(p, zs[i], opt);
        }
    }
    return out;
}

} // namespace helix
