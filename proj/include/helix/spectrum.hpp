#pragma once

/** \file spectrum.hpp
 *
 *  \brief Quantised (E, Omega) pairs of the oscillator on the helicoid.
 *
 *  The radial wavefunction is (1 + w^2 rho^2)^{(gamma+1)/2} exp(-varpi rho^2 / 2)
 *  times a confluent Heun function of z = -w^2 rho^2. Normalisable states need
 *  that Heun function to truncate to a polynomial of degree n, which fixes the
 *  energy and the oscillator frequency jointly:
 *
 *      E = hbar Omega (2n + x/2 + 3/2)      (C_{n+2} = 0)
 *      v_{n+1}(E, Omega) = 0                (the remaining determinant condition)
 *
 *  Omega is therefore an output of every closed form, not an input.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "helix/errors.hpp"
#include "helix/heun.hpp"
#include "helix/model.hpp"

namespace helix {

enum class Branch { ground, n1_minus, n1_plus, generic };

constexpr std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::ground: return "ground";
    case Branch::n1_minus: return "n1_minus";
    case Branch::n1_plus: return "n1_plus";
    case Branch::generic: return "generic";
    }
    return "unknown";
}

struct LineFlags
{
    bool x_real{true};
    bool frequency_positive{true};
    bool discriminant_real{true};
    bool nondegenerate_x{true};

    [[nodiscard]] bool allowed() const { return x_real && discriminant_real && nondegenerate_x; }
};

struct SpectrumLine
{
    int n{0};
    int m{0};
    double energy{0.0};
    double frequency{0.0}; ///< constrained oscillator frequency Omega
    Branch branch{Branch::ground};
    LineFlags flags{};
    MassPair masses{};
    double x{0.0};
    double hbar{1.0};
    double omega{1.0};
};

/// Heun parameters of the even solution plus the auxiliaries x, varpi and k^2.
struct HeunMapping
{
    HeunParams heun;
    double x;
    double varpi;
    double k2;
};

[[nodiscard]] inline HeunMapping heun_parameters(const ModelParams& p, double energy)
{
    if (p.omega == 0.0) {
        throw Error(ErrorCode::ZeroTwist, "Heun reduction needs a nonzero twist rate");
    }
    const double x = anisotropy_x(p.masses);
    const double m1 = p.masses.m1;
    const double w2 = p.omega * p.omega;
    const double varpi = m1 * p.Omega / p.hbar;
    const double k2 = 2.0 * m1 * energy / (p.hbar * p.hbar);
    const double m_sq = static_cast<double>(p.m) * static_cast<double>(p.m);
    HeunParams h;
    h.alpha = varpi / w2;
    h.beta = -0.5;
    h.gamma = 0.5 * x;
    h.delta = -k2 / (4.0 * w2);
    h.eta = (3.0 - 2.0 * m_sq) / 8.0 + m1 / (4.0 * p.masses.m2) + k2 / (4.0 * w2);
    return {h, x, varpi, k2};
}

/// E = hbar Omega (2n + x/2 + 3/2).
[[nodiscard]] constexpr double energy_from_cndA(double Omega, int n, double x, double hbar = 1.0)
{
    return hbar * Omega * (2.0 * n + 0.5 * x + 1.5);
}

/// Inverse of energy_from_cndA.
[[nodiscard]] constexpr double frequency_from_cndA(double energy, int n, double x,
                                                   double hbar = 1.0)
{
    return energy / (hbar * (2.0 * n + 0.5 * x + 1.5));
}

/// Omega fixed by v_1 = 0 for a given E.
[[nodiscard]] inline double omega_constraint_n0(const ModelParams& p, double energy)
{
    const double x = anisotropy_x(p.masses);
    const double m1 = p.masses.m1;
    const double w2 = p.omega * p.omega;
    const double m_sq = static_cast<double>(p.m) * static_cast<double>(p.m);
    return (p.hbar * w2 / m1)
           * (0.5 * x - m_sq + 2.0 * m1 * energy / (p.hbar * p.hbar * w2) + p.masses.ratio() + 0.5);
}

namespace detail {

inline SpectrumLine make_line(const MassPair& masses, int m, int n, double omega, double hbar,
                              double x, double energy, Branch branch)
{
    SpectrumLine line;
    line.n = n;
    line.m = m;
    line.energy = energy;
    line.frequency = frequency_from_cndA(energy, n, x, hbar);
    line.branch = branch;
    line.masses = masses;
    line.x = x;
    line.hbar = hbar;
    line.omega = omega;
    line.flags.frequency_positive = line.frequency > 0.0;
    return line;
}

inline double m_squared(int m) { return static_cast<double>(m) * static_cast<double>(m); }

} // namespace detail

/// Degree-zero Heun polynomial: joint solution of the two termination conditions at n = 0.
[[nodiscard]] inline SpectrumLine ground_state(const MassPair& masses, int m, double omega,
                                               double hbar = 1.0)
{
    masses.validate();
    const double x = anisotropy_x(masses);
    const double energy = (hbar * hbar * omega * omega / (4.0 * masses.m1)) * (x + 3.0) / (x + 2.0)
                          * (2.0 * detail::m_squared(m) - x - 2.0 * masses.ratio() - 1.0);
    return detail::make_line(masses, m, 0, omega, hbar, x, energy, Branch::ground);
}

/**
 * Degree-one Heun polynomials.
 *
 * With E = hbar Omega (x/2 + 7/2) substituted, v_2 = 0 is the quadratic
 *
 *   4(x+2)(x+6) e^2 + 4(x+7) P e + (x+7)^2 (2t+x+1)(2t+5x+13) = 0,
 *   e = 2 M1 E / (hbar w)^2,  t = M1/M2 - m^2,  P = 3x^2 + 23x + 32 + 2t(x+4),
 *
 * whose roots give E = hbar^2 w^2 (x+7)(-P -+ sqrt(D)) / (4 M1 (x+2)(x+6)) with
 * D = P^2 - (x+2)(x+6)(2t+x+1)(2t+5x+13). The first element is the lower root.
 */
[[nodiscard]] inline std::pair<SpectrumLine, SpectrumLine>
n1_spectrum(const MassPair& masses, int m, double omega, double hbar = 1.0)
{
    masses.validate();
    const double x = anisotropy_x(masses);
    const double t = masses.ratio() - detail::m_squared(m);
    const double P = 3.0 * x * x + 23.0 * x + 32.0 + 2.0 * t * (x + 4.0);
    const double D = P * P - (x + 2.0) * (x + 6.0) * (2.0 * t + x + 1.0) * (2.0 * t + 5.0 * x + 13.0);
    if (D < 0.0) {
        throw Error(ErrorCode::ComplexDiscriminant, "n = 1 discriminant is negative");
    }
    const double pre =
        hbar * hbar * omega * omega * (x + 7.0) / (4.0 * masses.m1 * (x + 2.0) * (x + 6.0));
    const double root = std::sqrt(D);
    return {detail::make_line(masses, m, 1, omega, hbar, x, pre * (-P - root), Branch::n1_minus),
            detail::make_line(masses, m, 1, omega, hbar, x, pre * (-P + root), Branch::n1_plus)};
}

/// Q and W polynomials of the published n = 1 energies E_{1,2} = pre (Q -+ 2 sqrt(W)).
struct PublishedN1Terms
{
    double prefactor;
    double Q;
    double W;
};

[[nodiscard]] inline PublishedN1Terms published_n1_terms(const MassPair& masses, int m,
                                                         double omega, double hbar = 1.0)
{
    masses.validate();
    const double x = anisotropy_x(masses);
    const double r = masses.ratio();
    const double m2 = detail::m_squared(m);
    const double x2 = x * x;
    if (std::abs(4.0 - x2) <= 1e-12) {
        throw Error(ErrorCode::DegenerateAnisotropy, "x = 2 (M1/M2 = 3/4) makes 4 - x^2 vanish");
    }
    const double pre = hbar * hbar * omega * omega * (3.0 + x) / (4.0 * masses.m1 * (4.0 - x2));
    const double Q = 3.0 * x2 - 2.0 * m2 * x + 2.0 * x * r + 11.0 * x + 4.0;
    const double W = 4.0 * m2 * m2 - 4.0 * m2 * x2 + x2 * x2 - 8.0 * r * m2 + 4.0 * r * x2
                     + 12.0 * x2 * x - 16.0 * m2 * x + 4.0 * r * r + 16.0 * r * x + 38.0 * x2
                     - 28.0 * m2 + 28.0 * r + 40.0 * x + 17.0;
    return {pre, Q, W};
}

/**
 * The n = 1 energies in the printed (Q, W) form. These do not satisfy the
 * termination conditions (see n1_spectrum for the exact roots); they are kept
 * to regenerate the published n = 1 curves, including their x = 2 pole and
 * their W < 0 exclusions.
 */
[[nodiscard]] inline std::pair<SpectrumLine, SpectrumLine>
n1_spectrum_published(const MassPair& masses, int m, double omega, double hbar = 1.0)
{
    const PublishedN1Terms t = published_n1_terms(masses, m, omega, hbar);
    if (t.W < 0.0) {
        throw Error(ErrorCode::ComplexDiscriminant, "W < 0: state not allowed");
    }
    const double x = anisotropy_x(masses);
    const double root = 2.0 * std::sqrt(t.W);
    return {detail::make_line(masses, m, 1, omega, hbar, x, t.prefactor * (t.Q - root),
                              Branch::n1_minus),
            detail::make_line(masses, m, 1, omega, hbar, x, t.prefactor * (t.Q + root),
                              Branch::n1_plus)};
}

/// The two frequencies solving the n = 1 determinant for a given energy (Omega_1 >= Omega_2).
[[nodiscard]] inline std::pair<double, double>
n1_determinant_frequencies(const MassPair& masses, int m, double omega, double hbar, double energy)
{
    masses.validate();
    const double x = anisotropy_x(masses);
    const double r = masses.ratio();
    const double m1 = masses.m1;
    const double m2 = detail::m_squared(m);
    const double h2w2 = hbar * hbar * omega * omega;
    const double h4w4 = h2w2 * h2w2;
    const double X = 0.5 * x - 0.6 * m2 + 0.6 * r + 1.7;
    const double Y = h4w4 * (m2 * m2 - 2.0 * r * m2 + r * r - 4.0 * m2 + 4.0 * r + 5.0 * x + 14.0)
                     + energy * h2w2 * m1 * (-4.0 * m2 + 4.0 * r + 8.0)
                     + 4.0 * energy * energy * m1 * m1;
    if (Y < 0.0) {
        throw Error(ErrorCode::ComplexDiscriminant, "Y < 0 in the n = 1 determinant");
    }
    const double base = h2w2 * X + 1.2 * m1 * energy;
    const double root = 0.4 * std::sqrt(Y);
    return {(base + root) / (m1 * hbar), (base - root) / (m1 * hbar)};
}

/// v_{n+1} with Omega tied to E through E = hbar Omega (2n + x/2 + 3/2).
[[nodiscard]] inline double termination_residual(const ModelParams& p, int n, double energy)
{
    const double x = anisotropy_x(p.masses);
    ModelParams q = p;
    q.Omega = frequency_from_cndA(energy, n, x, p.hbar);
    const HeunMapping map = heun_parameters(q, energy);
    std::vector<double> coeffs{1.0};
    detail::extend_coefficients(map.heun, coeffs, static_cast<std::size_t>(n) + 2);
    return coeffs.back();
}

/// Heun termination test for a line at its own (E, Omega).
[[nodiscard]] inline std::optional<int> line_termination(const SpectrumLine& line,
                                                         double energy_shift = 0.0,
                                                         double tol = 1e-10)
{
    ModelParams p{line.hbar, line.omega, line.frequency, line.m, line.masses};
    const HeunMapping map = heun_parameters(p, line.energy + energy_shift);
    return is_polynomial(map.heun, std::max(line.n + 1, 2), tol);
}

struct EnergyWindow
{
    double lo;
    double hi;
};

/**
 * Quantised energies of degree-n Heun polynomials inside a window.
 *
 * Omega is eliminated through the first termination condition; the roots of
 * v_{n+1}(E) are bracketed on a uniform scan and bisected. Each root must pass
 * is_polynomial to be reported.
 */
[[nodiscard]] inline std::vector<SpectrumLine>
generic_spectrum(const ModelParams& p, int n, EnergyWindow window, std::size_t scan_points = 2000)
{
    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "n must be nonnegative");
    }
    if (!std::isfinite(window.lo) || !std::isfinite(window.hi)) {
        throw Error(ErrorCode::InvalidArgument, "energy window must be finite");
    }
    if (!(window.hi > window.lo) || scan_points < 2) {
        throw Error(ErrorCode::NoRootInWindow, "energy window is empty");
    }
    p.masses.validate();
    const double x = anisotropy_x(p.masses);
    auto f = [&](double e) { return termination_residual(p, n, e); };

    const std::vector<double> scan = uniform_grid(window.lo, window.hi, scan_points);
    std::vector<double> values(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) {
        values[i] = f(scan[i]);
    }

    std::vector<double> roots;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (values[i] == 0.0) {
            roots.push_back(scan[i]);
            continue;
        }
        if (i + 1 == scan.size() || values[i + 1] == 0.0) {
            continue;
        }
        if (std::signbit(values[i]) == std::signbit(values[i + 1])) {
            continue;
        }
        double lo = scan[i];
        double hi = scan[i + 1];
        double flo = values[i];
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            const double fm = f(mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if (std::signbit(fm) == std::signbit(flo)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    if (roots.empty()) {
        throw Error(ErrorCode::NoRootInWindow, "no sign change of the termination coefficient");
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> merged;
    for (double r : roots) {
        if (merged.empty() || std::abs(r - merged.back()) > 1e-8 * std::max(1.0, std::abs(r))) {
            merged.push_back(r);
        }
    }

    std::vector<SpectrumLine> lines;
    for (double e : merged) {
        SpectrumLine line =
            detail::make_line(p.masses, p.m, n, p.omega, p.hbar, x, e, Branch::generic);
        if (line_termination(line)) {
            lines.push_back(line);
        }
    }
    return lines;
}

enum class Parity { even, odd };

constexpr std::string_view to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct WavefunctionSample
{
    std::vector<double> rho;
    std::vector<double> f;
    Parity parity{Parity::even};
    double norm{0.0};
};

/// ModelParams describing the radial equation at the line's constrained frequency.
[[nodiscard]] inline ModelParams line_model(const SpectrumLine& line)
{
    return {line.hbar, line.omega, line.frequency, line.m, line.masses};
}

inline void check_line(const SpectrumLine& line)
{
    if (!line.flags.x_real || !anisotropy_is_real(line.masses)) {
        throw Error(ErrorCode::InvalidLine, "line has complex anisotropy");
    }
    const double x = anisotropy_x(line.masses);
    const double expected = energy_from_cndA(line.frequency, line.n, x, line.hbar);
    const double scale = std::max({std::abs(line.energy), std::abs(expected), 1e-300});
    if (std::abs(expected - line.energy) > 1e-12 * scale) {
        throw Error(ErrorCode::InvalidLine, "energy and frequency violate E = hbar Omega (2n + x/2 + 3/2)");
    }
    if (!(line.frequency > 0.0)) {
        throw Error(ErrorCode::InvalidLine, "constrained frequency is not positive");
    }
}

/**
 * Samples the even (c_m) or odd (d_m) closed-form solution on a symmetric grid
 * and normalises it with the trapezoidal rule.
 *
 * The odd branch is rho * HeunC(alpha, -beta, ...); for the closed-form lines
 * (which terminate on the even branch) it is a valid local solution that grows
 * at large |rho|.
 */
[[nodiscard]] inline WavefunctionSample radial_wavefunction(const ModelParams& p,
                                                            const SpectrumLine& line,
                                                            Parity parity,
                                                            std::span<const double> grid,
                                                            const HeunOptions& opt = {})
{
    check_line(line);
    const std::size_t n = grid.size();
    if (n < 3) {
        throw Error(ErrorCode::InvalidArgument, "wavefunction grid needs at least three points");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(grid[i] + grid[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(grid[i]))) {
            throw Error(ErrorCode::InvalidArgument, "wavefunction grid must be symmetric about 0");
        }
    }
    ModelParams q = line_model(line);
    q.hbar = p.hbar;
    q.omega = p.omega;
    const HeunMapping map = heun_parameters(q, line.energy);
    HeunParams heun = map.heun;
    if (parity == Parity::odd) {
        heun.beta = -heun.beta;
    }
    const double w2 = q.omega * q.omega;
    std::vector<double> zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        zs[i] = -w2 * grid[i] * grid[i];
    }
    const std::vector<HeunValue> h = heunc_eval_many(heun, zs, opt);

    WavefunctionSample out;
    out.rho.assign(grid.begin(), grid.end());
    out.f.resize(n);
    out.parity = parity;
    const double exponent = 0.5 * (heun.gamma + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = grid[i];
        double v = std::pow(1.0 + w2 * rho * rho, exponent) * std::exp(-0.5 * map.varpi * rho * rho)
                   * h[i].value;
        if (parity == Parity::odd) {
            v *= rho;
        }
        out.f[i] = v;
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        integral += 0.5 * (grid[i + 1] - grid[i]) * (out.f[i] * out.f[i] + out.f[i + 1] * out.f[i + 1]);
    }
    out.norm = std::sqrt(integral);
    if (!(out.norm > 0.0) || !std::isfinite(out.norm)) {
        throw Error(ErrorCode::InvalidLine, "wavefunction is not normalisable on the grid");
    }
    for (double& v : out.f) {
        v /= out.norm;
    }
    return out;
}

/**
 * max |-(hbar^2/2M1) f'' + (V_eff - E) f| over interior samples, divided by
 * max |V_eff f|. f'' is the five-point central difference (O(h^4)), so the
 * grid must be uniform with at least five samples.
 */
[[nodiscard]] inline double radial_equation_residual(const ModelParams& p, double energy,
                                                     const WavefunctionSample& w)
{
    const std::size_t n = w.rho.size();
    if (n < 5) {
        throw Error(ErrorCode::InvalidArgument, "need at least five samples");
    }
    const double h = w.rho[1] - w.rho[0];
    const double kin = p.hbar * p.hbar / (2.0 * p.masses.m1);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(effective_potential(p, w.rho[i]) * w.f[i]));
    }
    const auto& f = w.f;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double d2 =
            (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
        const double r = -kin * d2 + (effective_potential(p, w.rho[i]) - energy) * f[i];
        worst = std::max(worst, std::abs(r));
    }
    return scale > 0.0 ? worst / scale : worst;
}

} // namespace helix
