#pragma once

/** \file model.hpp
 *
 *  \brief Physical configuration of the oscillator on the helicoid and the
 *         effective radial potential seen by the surface wavefunction.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "helix/errors.hpp"

namespace helix {

/// Surface mass M1 (> 0) and normal mass M2 (nonzero, any sign).
struct MassPair
{
    double m1{1.0};
    double m2{1.0};

    [[nodiscard]] double ratio() const { return m1 / m2; }

    void validate() const
    {
        if (!(m1 > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "surface mass M1 must be positive");
        }
        if (m2 == 0.0) {
            throw Error(ErrorCode::ZeroMass, "normal mass M2 must be nonzero");
        }
    }
};

struct ModelParams
{
    double hbar{1.0};
    double omega{1.0}; ///< helicoid twist rate
    double Omega{1.0}; ///< oscillator angular frequency
    int m{0};          ///< angular quantum number
    MassPair masses{};
};

/// x = sqrt(4 M1/M2 + 1). Throws ComplexAnisotropy when the radicand is negative.
[[nodiscard]] inline double anisotropy_x(const MassPair& masses)
{
    if (masses.m2 == 0.0) {
        throw Error(ErrorCode::ZeroMass, "normal mass M2 must be nonzero");
    }
    const double radicand = 4.0 * masses.m1 / masses.m2 + 1.0;
    if (radicand < 0.0) {
        throw Error(ErrorCode::ComplexAnisotropy, "4 M1/M2 + 1 < 0");
    }
    return std::sqrt(radicand);
}

[[nodiscard]] inline bool anisotropy_is_real(const MassPair& masses)
{
    return masses.m2 != 0.0 && 4.0 * masses.m1 / masses.m2 + 1.0 >= 0.0;
}

/// Centrifugal, curvature and oscillator terms of the radial equation.
[[nodiscard]] inline double effective_potential(const ModelParams& p, double rho)
{
    const double m1 = p.masses.m1;
    const double w2 = p.omega * p.omega;
    const double w2r2 = w2 * rho * rho;
    const double a2 = 1.0 + w2r2;
    const double m_sq = static_cast<double>(p.m) * static_cast<double>(p.m);
    const double bracket =
        m_sq * w2 / a2 - (w2 / (2.0 * a2 * a2)) * (0.5 * w2r2 + 2.0 * p.masses.ratio() - 1.0);
    return (p.hbar * p.hbar / (2.0 * m1)) * bracket + 0.5 * m1 * p.Omega * p.Omega * rho * rho;
}

struct ProfileRow
{
    double rho;
    double value;
};

/// Uniform grid of `count` points on [lo, hi]; endpoints and the midpoint are exact.
[[nodiscard]] inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count)
{
    if (count == 0) {
        throw Error(ErrorCode::InvalidArgument, "grid must contain at least one point");
    }
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = lo;
        return grid;
    }
    const double width = hi - lo;
    const double denom = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = lo + width * (static_cast<double>(i) / denom);
    }
    grid.back() = hi;
    return grid;
}

/// Grid on [lo, hi] with approximately the requested spacing (rounded to a whole count).
[[nodiscard]] inline std::vector<double> spaced_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || hi < lo) {
        throw Error(ErrorCode::InvalidArgument, "invalid grid bounds or spacing");
    }
    const auto intervals = static_cast<std::size_t>(std::llround((hi - lo) / step));
    return uniform_grid(lo, hi, intervals + 1);
}

[[nodiscard]] inline std::vector<ProfileRow> potential_profile(const ModelParams& p,
                                                               std::span<const double> grid)
{
    if (grid.empty()) {
        throw Error(ErrorCode::InvalidArgument, "profile grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "profile grid must be strictly increasing");
        }
    }
    std::vector<ProfileRow> rows;
    rows.reserve(grid.size());
    for (double rho : grid) {
        rows.push_back({rho, effective_potential(p, rho)});
    }
    return rows;
}

struct LocalMinimum
{
    std::size_t index;
    double rho;
    double value;
};

/**
 * Interior strict local minima of a sampled profile.
 *
 * A run of equal samples counts as one minimum, located at its leftmost
 * sample, when both neighbours of the run lie strictly above it. Runs that
 * touch either end of the table are not interior and are ignored.
 */
[[nodiscard]] inline std::vector<LocalMinimum> classify_minima(std::span<const ProfileRow> profile)
{
    std::vector<LocalMinimum> minima;
    const std::size_t n = profile.size();
    if (n < 3) {
        return minima;
    }
    std::size_t i = 1;
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && profile[j + 1].value == profile[i].value) {
            ++j;
        }
        if (j + 1 >= n) {
            break;
        }
        if (profile[i - 1].value > profile[i].value && profile[j + 1].value > profile[i].value) {
            minima.push_back({i, profile[i].rho, profile[i].value});
        }
        i = j + 1;
    }
    return minima;
}

} // namespace helix
