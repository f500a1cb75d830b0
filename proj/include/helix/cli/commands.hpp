#pragma once

/** \file commands.hpp
 *
 *  \brief The helix-spectra subcommands. Each returns a process exit code:
 *         0 success, 1 verification failure, 2 usage or configuration error.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "helix/cli/config.hpp"
#include "helix/cli/csv.hpp"
#include "helix/geometry.hpp"
#include "helix/heun.hpp"
#include "helix/model.hpp"
#include "helix/radial_solver.hpp"
#include "helix/spectrum.hpp"

namespace helix::cli {

/// Runs body(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

inline std::string mass_label(const MassPair& mp)
{
    return "m1_" + format_short(mp.m1) + "_m2_" + format_short(mp.m2);
}

inline std::string m_column(int m)
{
    return m < 0 ? "veff_m_neg" + std::to_string(-m) : "veff_m" + std::to_string(m);
}

// ---------------------------------------------------------------- potential

inline int cmd_potential(const RunConfig& c, std::ostream& log)
{
    const auto grid = spaced_grid(c.profile.rho_min, c.profile.rho_max, c.profile.drho);
    const auto cfg = config_to_json(c);

    struct Cell
    {
        std::vector<ProfileRow> profile;
        std::vector<LocalMinimum> minima;
    };
    std::vector<Cell> cells(c.masses.size() * c.m.size());
    parallel_for(cells.size(), resolve_threads(c.parallel), [&](std::size_t k) {
        const MassPair& mp = c.masses[k / c.m.size()];
        const int m = c.m[k % c.m.size()];
        ModelParams p{c.hbar, c.omega, c.Omega, m, mp};
        cells[k].profile = potential_profile(p, grid);
        cells[k].minima = classify_minima(cells[k].profile);
    });

    CsvTable summary({"m1", "m2", "m", "minima_count", "minima_count_nonnegative", "locations"});
    for (std::size_t a = 0; a < c.masses.size(); ++a) {
        std::vector<std::string> cols{"rho"};
        for (int m : c.m) {
            cols.push_back(m_column(m));
        }
        CsvTable table(cols);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            table.row().add(grid[i]);
            for (std::size_t j = 0; j < c.m.size(); ++j) {
                table.add(cells[a * c.m.size() + j].profile[i].value);
            }
        }
        const std::string file = "potential_" + mass_label(c.masses[a]) + ".csv";
        write_table(c.out, file, table, "potential", cfg);
        log << "wrote " << (c.out / file).string() << "\n";

        for (std::size_t j = 0; j < c.m.size(); ++j) {
            const auto& minima = cells[a * c.m.size() + j].minima;
            std::string where;
            std::size_t nonneg = 0;
            for (const auto& mn : minima) {
                if (!where.empty()) {
                    where += ';';
                }
                where += format_number(mn.rho);
                nonneg += mn.rho >= 0.0 ? 1 : 0;
            }
            summary.row()
                .add(c.masses[a].m1)
                .add(c.masses[a].m2)
                .add(c.m[j])
                .add(minima.size())
                .add(nonneg)
                .add(where);
        }
    }
    write_table(c.out, "potential_minima.csv", summary, "potential", cfg);
    log << "wrote " << (c.out / "potential_minima.csv").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- surface3d

/// m = 1 is dropped unless requested, since its surface matches m = 0 in shape.
inline std::vector<int> surface_m_values(const RunConfig& c, bool m_explicit)
{
    if (m_explicit || c.surface.include_m1) {
        return c.m;
    }
    std::vector<int> ms;
    for (int m : c.m) {
        if (m != 1) {
            ms.push_back(m);
        }
    }
    return ms;
}

inline int cmd_surface3d(const RunConfig& c, bool m_explicit, std::ostream& log)
{
    const auto ms = surface_m_values(c, m_explicit);
    const auto rhos = uniform_grid(c.surface.rho_min, c.surface.rho_max, c.surface.rho_points);
    const auto zs = uniform_grid(c.surface.z_min, c.surface.z_max, c.surface.z_points);
    const auto cfg = config_to_json(c);
    const HelicoidParams h{c.omega};

    std::vector<CsvTable> tables(c.masses.size() * ms.size(),
                                 CsvTable({"rho", "z", "x", "y", "veff"}));
    parallel_for(tables.size(), resolve_threads(c.parallel), [&](std::size_t k) {
        const MassPair& mp = c.masses[k / ms.size()];
        ModelParams p{c.hbar, c.omega, c.Omega, ms[k % ms.size()], mp};
        std::vector<double> veff(rhos.size());
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            veff[i] = effective_potential(p, rhos[i]);
        }
        auto& t = tables[k];
        for (double z : zs) {
            for (std::size_t i = 0; i < rhos.size(); ++i) {
                const Vec3 r = embed(h, {rhos[i], z});
                t.row().add(rhos[i]).add(z).add(r[0]).add(r[1]).add(veff[i]);
            }
        }
    });
    for (std::size_t k = 0; k < tables.size(); ++k) {
        const std::string file = "surface_" + mass_label(c.masses[k / ms.size()]) + "_m_"
                                 + std::to_string(ms[k % ms.size()]) + ".csv";
        write_table(c.out, file, tables[k], "surface3d", cfg);
        log << "wrote " << (c.out / file).string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- spectrum

/// One spectrum row; `line` is empty when the state is not allowed.
struct SpectrumRow
{
    MassPair masses;
    int m;
    int n;
    Branch branch;
    LineFlags flags;
    std::optional<double> x;
    std::optional<SpectrumLine> line;
};

namespace detail {

inline void push_blank(std::vector<SpectrumRow>& rows, const MassPair& mp, int m, int n,
                       Branch b, LineFlags f, std::optional<double> x)
{
    f.frequency_positive = false;
    rows.push_back({mp, m, n, b, f, x, std::nullopt});
}

inline void push_line(std::vector<SpectrumRow>& rows, const SpectrumLine& line)
{
    rows.push_back({line.masses, line.m, line.n, line.branch, line.flags, line.x, line});
}

inline std::vector<SpectrumRow> cell_rows(const RunConfig& c, const MassPair& mp, int m, int n)
{
    std::vector<SpectrumRow> rows;
    if (!anisotropy_is_real(mp)) {
        LineFlags f;
        f.x_real = false;
        if (n == 0) {
            push_blank(rows, mp, m, n, Branch::ground, f, std::nullopt);
        } else if (n == 1) {
            push_blank(rows, mp, m, n, Branch::n1_minus, f, std::nullopt);
            push_blank(rows, mp, m, n, Branch::n1_plus, f, std::nullopt);
        } else {
            push_blank(rows, mp, m, n, Branch::generic, f, std::nullopt);
        }
        return rows;
    }
    const double x = anisotropy_x(mp);
    if (n == 0) {
        push_line(rows, ground_state(mp, m, c.omega, c.hbar));
        return rows;
    }
    if (n == 1) {
        try {
            const auto pair = c.n1_form == "published" ? n1_spectrum_published(mp, m, c.omega, c.hbar)
                                                       : n1_spectrum(mp, m, c.omega, c.hbar);
            push_line(rows, pair.first);
            push_line(rows, pair.second);
        } catch (const Error& e) {
            LineFlags f;
            if (e.code() == ErrorCode::ComplexDiscriminant) {
                f.discriminant_real = false;
            } else if (e.code() == ErrorCode::DegenerateAnisotropy) {
                f.nondegenerate_x = false;
            } else {
                throw;
            }
            push_blank(rows, mp, m, n, Branch::n1_minus, f, x);
            push_blank(rows, mp, m, n, Branch::n1_plus, f, x);
        }
        return rows;
    }
    ModelParams p{c.hbar, c.omega, c.Omega, m, mp};
    try {
        for (const auto& line : generic_spectrum(p, n, c.window)) {
            push_line(rows, line);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRootInWindow) {
            throw;
        }
    }
    return rows;
}

} // namespace detail

/// All rows for the configured masses, m values and n values, in that nesting order.
inline std::vector<SpectrumRow> spectrum_rows(const RunConfig& c)
{
    struct Key
    {
        std::size_t mass;
        int m;
        int n;
    };
    std::vector<Key> keys;
    for (std::size_t a = 0; a < c.masses.size(); ++a) {
        for (int m : c.m) {
            for (int n : c.n) {
                keys.push_back({a, m, n});
            }
        }
    }
    std::vector<std::vector<SpectrumRow>> parts(keys.size());
    parallel_for(keys.size(), resolve_threads(c.parallel), [&](std::size_t k) {
        parts[k] = detail::cell_rows(c, c.masses[keys[k].mass], keys[k].m, keys[k].n);
    });
    std::vector<SpectrumRow> rows;
    for (auto& p : parts) {
        rows.insert(rows.end(), p.begin(), p.end());
    }
    return rows;
}

inline const std::vector<std::string>& spectrum_columns()
{
    static const std::vector<std::string> cols{
        "m1", "m2", "m", "n", "branch", "energy", "frequency", "x",
        "x_real", "frequency_positive", "discriminant_real", "nondegenerate_x"};
    return cols;
}

inline CsvTable spectrum_table(const std::vector<SpectrumRow>& rows)
{
    CsvTable t(spectrum_columns());
    for (const auto& r : rows) {
        t.row().add(r.masses.m1).add(r.masses.m2).add(r.m).add(r.n).add(to_string(r.branch));
        if (r.line) {
            t.add(r.line->energy).add(r.line->frequency);
        } else {
            t.blank().blank();
        }
        t.add(r.x)
            .add(r.flags.x_real)
            .add(r.flags.frequency_positive)
            .add(r.flags.discriminant_real)
            .add(r.flags.nondegenerate_x);
    }
    return t;
}

inline int cmd_spectrum(const RunConfig& c, std::ostream& log)
{
    const auto rows = spectrum_rows(c);
    write_table(c.out, "spectrum.csv", spectrum_table(rows), "spectrum", config_to_json(c));
    log << "wrote " << (c.out / "spectrum.csv").string() << " (" << rows.size() << " rows)\n";
    return 0;
}

/// Reads spectrum.csv back; hbar and omega come from the sidecar when present.
inline std::vector<SpectrumRow> read_spectrum(const std::filesystem::path& path, double hbar,
                                              double omega)
{
    const auto mp = meta_path(path);
    if (std::filesystem::exists(mp)) {
        std::ifstream in(mp);
        const auto meta = nlohmann::json::parse(in);
        hbar = meta.at("config").at("hbar").get<double>();
        omega = meta.at("config").at("omega").get<double>();
    }
    const CsvData data = read_csv(path);
    const auto col = [&](const char* name) { return data.column(name); };
    const auto flag = [](const std::string& s) { return s == "true"; };
    const std::size_t i_m1 = col("m1"), i_m2 = col("m2"), i_m = col("m"), i_n = col("n"),
                      i_b = col("branch"), i_e = col("energy"), i_f = col("frequency"),
                      i_x = col("x"), i_xr = col("x_real"), i_fp = col("frequency_positive"),
                      i_dr = col("discriminant_real"), i_nd = col("nondegenerate_x");
    std::vector<SpectrumRow> rows;
    for (const auto& r : data.rows) {
        SpectrumRow row;
        row.masses = {*parse_cell(r[i_m1]), *parse_cell(r[i_m2])};
        row.m = static_cast<int>(*parse_cell(r[i_m]));
        row.n = static_cast<int>(*parse_cell(r[i_n]));
        const std::string& b = r[i_b];
        row.branch = b == "ground"     ? Branch::ground
                     : b == "n1_minus" ? Branch::n1_minus
                     : b == "n1_plus"  ? Branch::n1_plus
                                       : Branch::generic;
        row.flags = {flag(r[i_xr]), flag(r[i_fp]), flag(r[i_dr]), flag(r[i_nd])};
        row.x = parse_cell(r[i_x]);
        const auto e = parse_cell(r[i_e]);
        const auto f = parse_cell(r[i_f]);
        if (e && f && row.x) {
            SpectrumLine line;
            line.n = row.n;
            line.m = row.m;
            line.energy = *e;
            line.frequency = *f;
            line.branch = row.branch;
            line.flags = row.flags;
            line.masses = row.masses;
            line.x = *row.x;
            line.hbar = hbar;
            line.omega = omega;
            row.line = line;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------- verify

struct VerifyTolerances
{
    double eigenvalue_rel{1e-4};
    double wavefunction_residual{1e-6};
    double tail{1e-4};    ///< |f| at the box edge relative to its peak
    double spacing{1e-3}; ///< sample spacing for the closed-form wavefunction
    double odd_growth{10.0}; ///< odd branch sampled where varpi rho^2 / 2 <= this
};

struct VerifyOutcome
{
    enum class Status { pass, fail, skip };
    Status status{Status::skip};
    std::string reason;
    std::optional<double> numeric_energy;
    std::optional<double> relative_error;
    std::optional<int> termination_degree;
    std::optional<double> even_residual;
    std::optional<double> odd_residual;
    std::optional<double> tail;
    std::optional<int> closed_nodes;
    std::optional<int> numeric_nodes;
    std::string numeric_parity;
};

inline std::string_view to_string(VerifyOutcome::Status s)
{
    switch (s) {
    case VerifyOutcome::Status::pass: return "pass";
    case VerifyOutcome::Status::fail: return "fail";
    case VerifyOutcome::Status::skip: return "skip";
    }
    return "unknown";
}

/// Grid used for the numeric cross-check of a line: configured L, or max(12, 6/sqrt(varpi)).
inline RadialGrid verify_grid(const SpectrumLine& line, const SolverSettings& s)
{
    const double varpi = line.masses.m1 * line.frequency / line.hbar;
    RadialGrid g = default_grid(varpi);
    if (s.L) {
        g.half_width = *s.L;
    }
    g.points = s.N;
    return g;
}

/**
 * Cross-checks one closed-form line against the finite-difference spectrum,
 * the Heun termination test, the radial equation and the numeric eigenfunction.
 */
inline VerifyOutcome verify_line(const SpectrumRow& row, const SolverSettings& settings,
                                 const VerifyTolerances& tol = {})
{
    VerifyOutcome out;
    if (!row.line) {
        out.reason = !row.flags.x_real            ? "complex anisotropy"
                     : !row.flags.discriminant_real ? "complex discriminant"
                     : !row.flags.nondegenerate_x   ? "degenerate anisotropy"
                                                    : "no closed form";
        return out;
    }
    const SpectrumLine& line = *row.line;
    if (!(line.frequency > 0.0)) {
        out.reason = "constrained Ω ≤ 0";
        return out;
    }
    std::vector<std::string> failures;
    try {
        check_line(line);
        const ModelParams p = line_model(line);
        const RadialGrid g = verify_grid(line, settings);
        const DiscreteOperator op = discretize(p, g);
        const double e_num = nearest_eigenvalue(op, line.energy);
        out.numeric_energy = e_num;
        out.relative_error = std::abs(e_num - line.energy) / std::max(std::abs(line.energy), 1e-300);
        if (!(*out.relative_error <= tol.eigenvalue_rel)) {
            failures.push_back("eigenvalue mismatch");
        }

        out.termination_degree = line_termination(line);
        if (out.termination_degree != line.n) {
            failures.push_back("Heun series does not terminate at degree n");
        }

        const auto half = static_cast<std::size_t>(std::llround(g.half_width / tol.spacing));
        const auto samples = uniform_grid(-g.half_width, g.half_width, 2 * half + 1);
        const WavefunctionSample even = radial_wavefunction(p, line, Parity::even, samples);
        out.even_residual = radial_equation_residual(p, line.energy, even);
        double peak = 0.0;
        for (double v : even.f) {
            peak = std::max(peak, std::abs(v));
        }
        out.tail = std::max(std::abs(even.f.front()), std::abs(even.f.back())) / peak;
        out.closed_nodes = count_nodes(even.f);
        if (!(*out.even_residual <= tol.wavefunction_residual)) {
            failures.push_back("even wavefunction residual");
        }
        if (!(*out.tail <= tol.tail)) {
            failures.push_back("wavefunction tail not decayed");
        }
        try {
            // The odd branch grows like exp(+varpi rho^2 / 2), so it is only
            // checked as a local solution near the origin.
            const double varpi = line.masses.m1 * line.frequency / line.hbar;
            const double reach = std::min(g.half_width, std::sqrt(2.0 * tol.odd_growth / varpi));
            const auto k = static_cast<std::size_t>(std::llround(reach / tol.spacing));
            const auto odd_grid = uniform_grid(-reach, reach, 2 * k + 1);
            // Dense-output jitter is amplified by 1/h^2 in the stencil; integrate tightly.
            HeunOptions tight;
            tight.rel_tol = 1e-13;
            tight.abs_tol = 1e-16;
            const WavefunctionSample odd =
                radial_wavefunction(p, line, Parity::odd, odd_grid, tight);
            out.odd_residual = radial_equation_residual(p, line.energy, odd);
            if (!(*out.odd_residual <= tol.wavefunction_residual)) {
                failures.push_back("odd wavefunction residual");
            }
        } catch (const Error& e) {
            failures.push_back(std::string("odd wavefunction: ") + e.what());
        }

        const Eigenpair ep = eigenfunction(op, e_num);
        out.numeric_parity = ep.parity ? std::string(to_string(*ep.parity)) : "mixed";
        out.numeric_nodes = ep.nodes;
        if (!ep.parity || *ep.parity != Parity::even) {
            failures.push_back("numeric eigenfunction is not even");
        }
        if (ep.nodes != *out.closed_nodes) {
            failures.push_back("node count differs from closed form");
        }
    } catch (const Error& e) {
        failures.push_back(std::string(to_string(e.code())) + ": " + e.what());
    }
    out.status = failures.empty() ? VerifyOutcome::Status::pass : VerifyOutcome::Status::fail;
    for (const auto& f : failures) {
        if (!out.reason.empty()) {
            out.reason += "; ";
        }
        out.reason += f;
    }
    return out;
}

inline int cmd_verify(const RunConfig& c, std::ostream& log)
{
    const std::vector<SpectrumRow> rows =
        c.lines_csv.empty() ? spectrum_rows(c) : read_spectrum(c.lines_csv, c.hbar, c.omega);
    std::vector<VerifyOutcome> outcomes(rows.size());
    parallel_for(rows.size(), resolve_threads(c.parallel),
                 [&](std::size_t i) { outcomes[i] = verify_line(rows[i], c.grid); });

    CsvTable t({"m1", "m2", "m", "n", "branch", "energy", "frequency", "status", "reason",
                "numeric_energy", "relative_error", "termination_degree", "even_residual",
                "odd_residual", "tail", "closed_nodes", "numeric_nodes", "numeric_parity"});
    std::size_t checked = 0, passed = 0, failed = 0, skipped = 0;
    std::ostringstream report;
    const auto opt_int = [](std::optional<int> v) {
        return v ? std::to_string(*v) : std::string{};
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto& o = outcomes[i];
        t.row().add(r.masses.m1).add(r.masses.m2).add(r.m).add(r.n).add(to_string(r.branch));
        t.add(r.line ? std::optional<double>(r.line->energy) : std::nullopt)
            .add(r.line ? std::optional<double>(r.line->frequency) : std::nullopt)
            .add(to_string(o.status))
            .add(o.reason)
            .add(o.numeric_energy)
            .add(o.relative_error)
            .add(opt_int(o.termination_degree))
            .add(o.even_residual)
            .add(o.odd_residual)
            .add(o.tail)
            .add(opt_int(o.closed_nodes))
            .add(opt_int(o.numeric_nodes))
            .add(o.numeric_parity);
        switch (o.status) {
        case VerifyOutcome::Status::pass: ++checked; ++passed; break;
        case VerifyOutcome::Status::fail: ++checked; ++failed; break;
        case VerifyOutcome::Status::skip: ++skipped; break;
        }
        if (o.status != VerifyOutcome::Status::pass) {
            report << to_string(o.status) << "  (" << format_short(r.masses.m1) << ", "
                   << format_short(r.masses.m2) << ") m=" << r.m << " n=" << r.n << " "
                   << to_string(r.branch) << ": " << o.reason << "\n";
        }
    }
    report << checked << " checked, " << passed << " passed, " << failed << " failed, "
           << skipped << " skipped\n";

    const auto cfg = config_to_json(c);
    write_table(c.out, "verify.csv", t, "verify", cfg);
    std::filesystem::create_directories(c.out);
    write_atomic(c.out / "verify.txt", report.str());
    log << report.str();
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- heun

inline int cmd_heun(const RunConfig& c, std::ostream& log)
{
    if (c.heun_params.size() != 5) {
        throw ConfigError("heun needs exactly five parameters: alpha,beta,gamma,delta,eta");
    }
    for (double z : c.heun_z) {
        if (z == 1.0) {
            throw ConfigError("z = 1 is a singular point of the confluent Heun equation");
        }
        if (z > 1.0) {
            throw ConfigError("z > 1 lies beyond the singular point z = 1");
        }
    }
    const HeunParams p{c.heun_params[0], c.heun_params[1], c.heun_params[2], c.heun_params[3],
                       c.heun_params[4]};
    CsvTable t({"z", "value", "derivative", "method", "residual", "relative_residual"});
    for (double z : c.heun_z) {
        const HeunValue v = heunc_eval(p, z);
        t.row().add(z).add(v.value).add(v.derivative).add(to_string(v.method));
        if (z == 0.0) {
            t.blank().blank();
        } else {
            t.add(ode_residual(p, z, v.value, v.derivative, v.second_derivative))
                .add(relative_ode_residual(p, z, v.value, v.derivative, v.second_derivative));
        }
    }
    write_table(c.out, "heun.csv", t, "heun", config_to_json(c));
    log << "wrote " << (c.out / "heun.csv").string() << "\n";
    return 0;
}

} // namespace helix::cli
