#pragma once

/** \file radial_solver.hpp
 *
 *  \brief Finite-difference eigensolver for the radial equation
 *         -(hbar^2 / 2 M1) f'' + V_eff f = E f on [-L, L] with f(+-L) = 0.
 *
 *  Independent of the Heun machinery: the operator is a symmetric tridiagonal
 *  matrix whose lowest eigenvalues are isolated by Sturm-sequence counting.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "helix/errors.hpp"
#include "helix/model.hpp"
#include "helix/spectrum.hpp"

namespace helix {

struct RadialGrid
{
    double half_width{12.0};
    std::size_t points{6001};

    [[nodiscard]] double spacing() const
    {
        return 2.0 * half_width / static_cast<double>(points - 1);
    }

    [[nodiscard]] double rho(std::size_t i) const
    {
        // symmetric expression keeps rho(i) == -rho(points - 1 - i) exactly
        const double c = static_cast<double>(points - 1) / 2.0;
        return (static_cast<double>(i) - c) / c * half_width;
    }

    void validate() const
    {
        if (!(half_width > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "grid half-width must be positive");
        }
        if (points < 3 || points % 2 == 0) {
            throw Error(ErrorCode::InvalidArgument, "grid point count must be odd and >= 3");
        }
    }

    /// Interior abscissae (Dirichlet nodes excluded).
    [[nodiscard]] std::vector<double> interior() const
    {
        std::vector<double> r(points - 2);
        for (std::size_t i = 1; i + 1 < points; ++i) {
            r[i - 1] = rho(i);
        }
        return r;
    }
};

/// L = max(12, 6/sqrt(varpi)), N = 6001.
[[nodiscard]] inline RadialGrid default_grid(double varpi)
{
    double L = 12.0;
    if (varpi > 0.0) {
        L = std::max(L, 6.0 / std::sqrt(varpi));
    }
    return {L, 6001};
}

struct DiscreteOperator
{
    std::vector<double> diagonal;
    double off_diagonal{0.0};
    RadialGrid grid;

    [[nodiscard]] std::size_t size() const { return diagonal.size(); }
};

[[nodiscard]] inline DiscreteOperator discretize(const ModelParams& p, const RadialGrid& g)
{
    g.validate();
    p.masses.validate();
    const double h = g.spacing();
    const double kin = p.hbar * p.hbar / (p.masses.m1 * h * h);
    DiscreteOperator op;
    op.grid = g;
    op.off_diagonal = -0.5 * kin;
    op.diagonal.resize(g.points - 2);
    for (std::size_t i = 1; i + 1 < g.points; ++i) {
        const double v = effective_potential(p, g.rho(i));
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "effective potential is not finite on the grid");
        }
        op.diagonal[i - 1] = kin + v;
    }
    return op;
}

/// Number of eigenvalues strictly below `lambda` (negative LDL^T pivots).
[[nodiscard]] inline std::size_t sturm_count(const DiscreteOperator& op, double lambda)
{
    const double e2 = op.off_diagonal * op.off_diagonal;
    const double tiny = std::abs(op.off_diagonal) * 1e-300 + 1e-300;
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < op.diagonal.size(); ++i) {
        q = op.diagonal[i] - lambda - (i == 0 ? 0.0 : e2 / q);
        if (q == 0.0) {
            q = -tiny;
        }
        if (q < 0.0) {
            ++count;
        }
    }
    return count;
}

namespace detail {

inline std::pair<double, double> gershgorin(const DiscreteOperator& op)
{
    const auto [lo, hi] = std::minmax_element(op.diagonal.begin(), op.diagonal.end());
    const double r = 2.0 * std::abs(op.off_diagonal);
    return {*lo - r, *hi + r};
}

/// k-th (0-based) eigenvalue by bisection inside [lo, hi].
inline double bisect_eigenvalue(const DiscreteOperator& op, std::size_t k, double lo, double hi,
                                double tol)
{
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (sturm_count(op, mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// The k smallest eigenvalues in ascending order, each bisected to `tol` (absolute).
[[nodiscard]] inline std::vector<double> lowest_eigenvalues(const DiscreteOperator& op,
                                                            std::size_t k, double tol = 1e-12)
{
    if (k < 1 || k > op.size()) {
        throw Error(ErrorCode::InvalidArgument, "requested eigenvalue count out of range");
    }
    auto [lo, hi] = detail::gershgorin(op);
    std::vector<double> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double ev = detail::bisect_eigenvalue(op, j, lo, hi, tol);
        out.push_back(ev);
        lo = std::max(lo, ev - 2.0 * tol);
    }
    return out;
}

/// The eigenvalue closest to `energy`.
[[nodiscard]] inline double nearest_eigenvalue(const DiscreteOperator& op, double energy,
                                               double tol = 1e-12)
{
    const auto [lo, hi] = detail::gershgorin(op);
    const std::size_t below = sturm_count(op, energy);
    std::optional<double> best;
    if (below > 0) {
        best = detail::bisect_eigenvalue(op, below - 1, lo, hi, tol);
    }
    if (below < op.size()) {
        const double above = detail::bisect_eigenvalue(op, below, lo, hi, tol);
        if (!best || std::abs(above - energy) < std::abs(*best - energy)) {
            best = above;
        }
    }
    return *best;
}

struct Eigenpair
{
    double energy{0.0};
    std::vector<double> vector; ///< interior samples, unit Euclidean norm
    std::optional<Parity> parity;
    int nodes{0};
    double residual{0.0};
    RadialGrid grid;
};

namespace detail {

/// Solves (T - shift) y = b for a symmetric tridiagonal T with partial pivoting.
inline std::vector<double> solve_shifted(const DiscreteOperator& op, double shift,
                                         std::vector<double> b)
{
    const std::size_t n = op.size();
    const double e = op.off_diagonal;
    std::vector<double> d(n);
    std::vector<double> du(n, e);
    std::vector<double> du2(n, 0.0);
    std::vector<double> dl(n, e);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = op.diagonal[i] - shift;
    }
    const double guard = std::numeric_limits<double>::epsilon() * (std::abs(e) + 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) {
                d[i] = guard;
            }
            const double f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - f * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            std::swap(b[i], b[i + 1]);
            b[i + 1] -= f * b[i];
        }
    }
    if (d[n - 1] == 0.0) {
        d[n - 1] = guard;
    }
    std::vector<double> y(n);
    y[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) {
        y[n - 2] = (b[n - 2] - du[n - 2] * y[n - 1]) / d[n - 2];
    }
    for (std::size_t k = n - 2; k-- > 0;) {
        y[k] = (b[k] - du[k] * y[k + 1] - du2[k] * y[k + 2]) / d[k];
    }
    return y;
}

inline double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

inline std::vector<double> apply(const DiscreteOperator& op, const std::vector<double>& v)
{
    const std::size_t n = op.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = op.diagonal[i] * v[i];
        if (i > 0) {
            s += op.off_diagonal * v[i - 1];
        }
        if (i + 1 < n) {
            s += op.off_diagonal * v[i + 1];
        }
        out[i] = s;
    }
    return out;
}

} // namespace detail

/// Even, odd, or nullopt when neither mirror relation holds to `tol` (relative to max |v|).
[[nodiscard]] inline std::optional<Parity> classify_parity(const std::vector<double>& v,
                                                           double tol = 1e-6)
{
    const std::size_t n = v.size();
    double vmax = 0.0;
    for (double x : v) {
        vmax = std::max(vmax, std::abs(x));
    }
    double even_dev = 0.0;
    double odd_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        even_dev = std::max(even_dev, std::abs(v[i] - v[n - 1 - i]));
        odd_dev = std::max(odd_dev, std::abs(v[i] + v[n - 1 - i]));
    }
    if (even_dev <= tol * vmax) {
        return Parity::even;
    }
    if (odd_dev <= tol * vmax) {
        return Parity::odd;
    }
    return std::nullopt;
}

/// Sign changes, ignoring samples below `floor` * max |v|.
[[nodiscard]] inline int count_nodes(const std::vector<double>& v, double floor = 1e-8)
{
    double vmax = 0.0;
    for (double x : v) {
        vmax = std::max(vmax, std::abs(x));
    }
    int nodes = 0;
    int last_sign = 0;
    for (double x : v) {
        if (std::abs(x) <= floor * vmax) {
            continue;
        }
        const int s = x > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) {
            ++nodes;
        }
        last_sign = s;
    }
    return nodes;
}

/**
 * Inverse iteration at shift `energy` from a seeded random start.
 * Throws NotAnEigenvalue if ||(H - E) f|| / ||f|| stays above `residual_tol`.
 */
[[nodiscard]] inline Eigenpair eigenfunction(const DiscreteOperator& op, double energy,
                                             double residual_tol = 1e-8, int max_iter = 50,
                                             unsigned seed = 20240611u)
{
    const std::size_t n = op.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(rng);
    }
    double nv = detail::norm2(v);
    for (double& x : v) {
        x /= nv;
    }
    double residual = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        v = detail::solve_shifted(op, energy, std::move(v));
        nv = detail::norm2(v);
        if (!std::isfinite(nv) || nv == 0.0) {
            throw Error(ErrorCode::NotAnEigenvalue, "inverse iteration broke down");
        }
        for (double& x : v) {
            x /= nv;
        }
        std::vector<double> hv = detail::apply(op, v);
        for (std::size_t i = 0; i < n; ++i) {
            hv[i] -= energy * v[i];
        }
        residual = detail::norm2(hv);
        if (residual <= residual_tol) {
            break;
        }
    }
    if (residual > residual_tol) {
        throw Error(ErrorCode::NotAnEigenvalue, "inverse iteration residual above tolerance");
    }
    // fix the overall sign: largest-magnitude sample positive
    const auto peak = std::max_element(v.begin(), v.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*peak < 0.0) {
        for (double& x : v) {
            x = -x;
        }
    }
    const std::vector<double> hv = detail::apply(op, v);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rq += v[i] * hv[i];
    }
    Eigenpair pair;
    pair.energy = rq;
    pair.parity = classify_parity(v);
    pair.nodes = count_nodes(v);
    pair.residual = residual;
    pair.grid = op.grid;
    pair.vector = std::move(v);
    return pair;
}

} // namespace helix
