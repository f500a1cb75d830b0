#pragma once

/** \file geometry.hpp
 *
 *  \brief Helicoid embedding, metric, curvatures and the geometric potential of a
 *         particle squeezed onto the surface, plus a finite-difference curvature
 *         oracle that works on any embedding.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <numbers>

#include "helix/errors.hpp"

namespace helix {

using Vec3 = std::array<double, 3>;

/// Twist rate omega = 2 pi S, S being the number of full turns per unit length.
struct HelicoidParams
{
    double omega{1.0};

    [[nodiscard]] static HelicoidParams from_twists(double turns_per_length)
    {
        return {2.0 * std::numbers::pi * turns_per_length};
    }

    [[nodiscard]] double twists() const { return omega / (2.0 * std::numbers::pi); }
};

/// rho spans the whole real line so that both halves of the ribbon are covered.
struct SurfaceCoords
{
    double rho{0.0};
    double z{0.0};
};

struct CurvaturePair
{
    double kappa1{0.0};
    double kappa2{0.0};
    double mean{0.0};
    double gaussian{0.0};

    [[nodiscard]] static CurvaturePair from_principal(double k1, double k2)
    {
        return {k1, k2, 0.5 * (k1 + k2), k1 * k2};
    }
};

/// Diagonal surface metric in (rho, z) coordinates.
struct SurfaceMetric
{
    double g_rho_rho{1.0};
    double g_rho_z{0.0};
    double g_z_z{1.0};

    [[nodiscard]] double determinant() const { return g_rho_rho * g_z_z - g_rho_z * g_rho_z; }
};

[[nodiscard]] inline Vec3 embed(const HelicoidParams& h, const SurfaceCoords& p)
{
    const double phase = h.omega * p.z;
    return {p.rho * std::cos(phase), p.rho * std::sin(phase), p.z};
}

[[nodiscard]] inline SurfaceMetric metric(const HelicoidParams& h, double rho)
{
    return {1.0, 0.0, 1.0 + h.omega * h.omega * rho * rho};
}

[[nodiscard]] inline CurvaturePair principal_curvatures(const HelicoidParams& h, double rho)
{
    const double k1 = h.omega / (1.0 + h.omega * h.omega * rho * rho);
    return CurvaturePair::from_principal(k1, -k1);
}

/// -(hbar^2 / 2 M2) (M^2 - K_G) specialised to the helicoid, where M = 0.
[[nodiscard]] inline double geometric_potential(const HelicoidParams& h, double m2, double hbar,
                                                double rho)
{
    if (m2 == 0.0) {
        throw Error(ErrorCode::ZeroMass, "normal mass M2 must be nonzero");
    }
    const double w2 = h.omega * h.omega;
    const double a2 = 1.0 + w2 * rho * rho;
    return -(hbar * hbar / (2.0 * m2)) * w2 / (a2 * a2);
}

namespace detail {

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

} // namespace detail

/**
 * Curvatures of an arbitrary parametrised surface r(u, v) from central differences.
 *
 * The first and second fundamental forms are assembled explicitly and the
 * Weingarten matrix I^{-1} II is diagonalised as a 2x2 eigenproblem. The
 * returned kappa1 is the larger eigenvalue. Sign conventions follow the normal
 * r_u x r_v.
 */
template <std::invocable<double, double> Embedding>
[[nodiscard]] CurvaturePair numeric_curvatures(Embedding&& embedding, const SurfaceCoords& p,
                                               double step = 1e-4)
{
    using detail::add;
    using detail::scale;
    using detail::sub;
    if (!(step > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    }
    const double u = p.rho;
    const double v = p.z;
    const double h = step;

    const Vec3 c = embedding(u, v);
    const Vec3 up = embedding(u + h, v);
    const Vec3 um = embedding(u - h, v);
    const Vec3 vp = embedding(u, v + h);
    const Vec3 vm = embedding(u, v - h);
    const Vec3 pp = embedding(u + h, v + h);
    const Vec3 pm = embedding(u + h, v - h);
    const Vec3 mp = embedding(u - h, v + h);
    const Vec3 mm = embedding(u - h, v - h);

    const Vec3 r_u = scale(sub(up, um), 0.5 / h);
    const Vec3 r_v = scale(sub(vp, vm), 0.5 / h);
    const Vec3 r_uu = scale(sub(add(up, um), scale(c, 2.0)), 1.0 / (h * h));
    const Vec3 r_vv = scale(sub(add(vp, vm), scale(c, 2.0)), 1.0 / (h * h));
    const Vec3 r_uv = scale(sub(sub(add(pp, mm), pm), mp), 0.25 / (h * h));

    const double E = detail::dot(r_u, r_u);
    const double F = detail::dot(r_u, r_v);
    const double G = detail::dot(r_v, r_v);
    const double det_first = E * G - F * F;
    if (!(det_first > 0.0)) {
        throw Error(ErrorCode::DegenerateMetric, "metric determinant is not positive");
    }

    Vec3 normal = detail::cross(r_u, r_v);
    normal = scale(normal, 1.0 / std::sqrt(detail::dot(normal, normal)));
    const double L = detail::dot(r_uu, normal);
    const double M = detail::dot(r_uv, normal);
    const double N = detail::dot(r_vv, normal);

    // Weingarten matrix S = I^{-1} II
    const double inv = 1.0 / det_first;
    const double s11 = inv * (G * L - F * M);
    const double s12 = inv * (G * M - F * N);
    const double s21 = inv * (E * M - F * L);
    const double s22 = inv * (E * N - F * M);

    const double half_trace = 0.5 * (s11 + s22);
    const double det_s = s11 * s22 - s12 * s21;
    const double disc = std::sqrt(std::max(0.0, half_trace * half_trace - det_s));
    return CurvaturePair::from_principal(half_trace + disc, half_trace - disc);
}

/// Convenience overload for the helicoid itself.
[[nodiscard]] inline CurvaturePair numeric_curvatures(const HelicoidParams& h,
                                                      const SurfaceCoords& p, double step = 1e-4)
{
    return numeric_curvatures([&h](double rho, double z) { return embed(h, {rho, z}); }, p, step);
}

} // namespace helix
