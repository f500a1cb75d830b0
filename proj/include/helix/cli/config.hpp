#pragma once

/** \file config.hpp
 *
 *  \brief Run configuration for helix-spectra: a JSON document plus command-line
 *         overrides. Flags win over file values.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "helix/model.hpp"
#include "helix/spectrum.hpp"

namespace helix::cli {

/// Raised for anything the user must fix in the configuration; maps to exit code 2.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct ProfileSettings
{
    double rho_min{-6.0};
    double rho_max{6.0};
    double drho{0.001};
};

struct SurfaceSettings
{
    double rho_min{-4.0};
    double rho_max{4.0};
    std::size_t rho_points{161};
    double z_min{-3.0};
    double z_max{3.0};
    std::size_t z_points{121};
    bool include_m1{false};
};

struct SolverSettings
{
    std::optional<double> L; ///< unset: max(12, 6/sqrt(varpi)) per line
    std::size_t N{6001};
};

struct RunConfig
{
    std::string name{"run"};
    double hbar{1.0};
    double omega{1.0};
    double Omega{1.0};
    std::vector<MassPair> masses{{1.0, 1.0}};
    std::vector<int> m{0, 1, 2, 3, 4};
    std::vector<int> n{0, 1};
    std::string n1_form{"exact"};
    ProfileSettings profile{};
    SurfaceSettings surface{};
    SolverSettings grid{};
    EnergyWindow window{-50.0, 50.0};
    std::vector<double> heun_params{};
    std::vector<double> heun_z{};
    std::string lines_csv{};
    std::filesystem::path out{"out"};
    int parallel{1};
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

inline double to_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) {
        throw ConfigError("not a number: '" + s + "'");
    }
    return v;
}

inline int to_int(const std::string& s)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    if (used != s.size()) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    return v;
}

} // namespace detail

/// "M1:M2[,M1:M2...]"
inline std::vector<MassPair> parse_masses(std::string_view text)
{
    std::vector<MassPair> out;
    if (detail::trim(text).empty()) {
        return out;
    }
    for (const auto& item : detail::split(text, ',')) {
        const auto parts = detail::split(item, ':');
        if (parts.size() != 2) {
            throw ConfigError("mass pair must look like M1:M2, got '" + item + "'");
        }
        out.push_back({detail::to_double(parts[0]), detail::to_double(parts[1])});
    }
    return out;
}

/// "0..4", "0,2,3" or a mix such as "0..2,5".
inline std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> out;
    if (detail::trim(text).empty()) {
        return out;
    }
    for (const auto& item : detail::split(text, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(detail::to_int(item));
            continue;
        }
        const int lo = detail::to_int(detail::trim(item.substr(0, dots)));
        const int hi = detail::to_int(detail::trim(item.substr(dots + 2)));
        if (hi < lo) {
            throw ConfigError("empty range '" + item + "'");
        }
        for (int v = lo; v <= hi; ++v) {
            out.push_back(v);
        }
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view text)
{
    std::vector<double> out;
    if (detail::trim(text).empty()) {
        return out;
    }
    for (const auto& item : detail::split(text, ',')) {
        out.push_back(detail::to_double(item));
    }
    return out;
}

/// "lo:hi"
inline EnergyWindow parse_window(std::string_view text)
{
    const auto parts = detail::split(text, ':');
    if (parts.size() != 2) {
        throw ConfigError("energy window must look like lo:hi");
    }
    return {detail::to_double(parts[0]), detail::to_double(parts[1])};
}

namespace detail {

inline std::vector<int> int_list_from_json(const nlohmann::json& j)
{
    if (j.is_string()) {
        return parse_int_list(j.get<std::string>());
    }
    if (j.is_number_integer()) {
        return {j.get<int>()};
    }
    return j.get<std::vector<int>>();
}

} // namespace detail

/// Reads the recognised keys of a configuration document on top of `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {})
{
    try {
        RunConfig c = std::move(base);
        if (!j.is_object()) {
            throw ConfigError("configuration must be a JSON object");
        }
        if (j.contains("name")) c.name = j.at("name").get<std::string>();
        if (j.contains("hbar")) c.hbar = j.at("hbar").get<double>();
        if (j.contains("omega")) c.omega = j.at("omega").get<double>();
        if (j.contains("Omega")) c.Omega = j.at("Omega").get<double>();
        if (j.contains("masses")) {
            c.masses.clear();
            for (const auto& pair : j.at("masses")) {
                if (!pair.is_array() || pair.size() != 2) {
                    throw ConfigError("each mass entry must be [M1, M2]");
                }
                c.masses.push_back({pair[0].get<double>(), pair[1].get<double>()});
            }
        }
        if (j.contains("m")) c.m = detail::int_list_from_json(j.at("m"));
        if (j.contains("n")) c.n = detail::int_list_from_json(j.at("n"));
        if (j.contains("n1_form")) c.n1_form = j.at("n1_form").get<std::string>();
        if (j.contains("profile")) {
            const auto& p = j.at("profile");
            c.profile.rho_min = p.value("rho_min", c.profile.rho_min);
            c.profile.rho_max = p.value("rho_max", c.profile.rho_max);
            c.profile.drho = p.value("drho", c.profile.drho);
        }
        if (j.contains("surface")) {
            const auto& s = j.at("surface");
            c.surface.rho_min = s.value("rho_min", c.surface.rho_min);
            c.surface.rho_max = s.value("rho_max", c.surface.rho_max);
            c.surface.rho_points = s.value("rho_points", c.surface.rho_points);
            c.surface.z_min = s.value("z_min", c.surface.z_min);
            c.surface.z_max = s.value("z_max", c.surface.z_max);
            c.surface.z_points = s.value("z_points", c.surface.z_points);
            c.surface.include_m1 = s.value("include_m1", c.surface.include_m1);
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("L") && !g.at("L").is_null()) c.grid.L = g.at("L").get<double>();
            c.grid.N = g.value("N", c.grid.N);
        }
        if (j.contains("energy_window")) {
            const auto w = j.at("energy_window").get<std::vector<double>>();
            if (w.size() != 2) {
                throw ConfigError("energy_window must be [lo, hi]");
            }
            c.window = {w[0], w[1]};
        }
        if (j.contains("heun")) {
            const auto& h = j.at("heun");
            if (h.contains("params")) c.heun_params = h.at("params").get<std::vector<double>>();
            if (h.contains("z")) c.heun_z = h.at("z").get<std::vector<double>>();
        }
        if (j.contains("lines")) c.lines_csv = j.at("lines").get<std::string>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("parallel")) c.parallel = j.at("parallel").get<int>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {})
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
    return config_from_json(j, std::move(base));
}

inline nlohmann::ordered_json config_to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["hbar"] = c.hbar;
    j["omega"] = c.omega;
    j["Omega"] = c.Omega;
    auto masses = nlohmann::ordered_json::array();
    for (const auto& mp : c.masses) {
        masses.push_back({mp.m1, mp.m2});
    }
    j["masses"] = masses;
    j["m"] = c.m;
    j["n"] = c.n;
    j["n1_form"] = c.n1_form;
    j["profile"] = {{"rho_min", c.profile.rho_min},
                    {"rho_max", c.profile.rho_max},
                    {"drho", c.profile.drho}};
    j["surface"] = {{"rho_min", c.surface.rho_min},   {"rho_max", c.surface.rho_max},
                    {"rho_points", c.surface.rho_points}, {"z_min", c.surface.z_min},
                    {"z_max", c.surface.z_max},       {"z_points", c.surface.z_points},
                    {"include_m1", c.surface.include_m1}};
    nlohmann::ordered_json grid;
    grid["L"] = c.grid.L ? nlohmann::ordered_json(*c.grid.L) : nlohmann::ordered_json(nullptr);
    grid["N"] = c.grid.N;
    j["grid"] = grid;
    j["energy_window"] = {c.window.lo, c.window.hi};
    j["heun"] = {{"params", c.heun_params}, {"z", c.heun_z}};
    if (!c.lines_csv.empty()) {
        j["lines"] = c.lines_csv;
    }
    j["out"] = c.out.generic_string();
    j["parallel"] = c.parallel;
    return j;
}

/// Checks shared by every subcommand.
inline void validate(const RunConfig& c)
{
    if (c.masses.empty()) {
        throw ConfigError("mass list is empty");
    }
    for (const auto& mp : c.masses) {
        if (!(mp.m1 > 0.0)) {
            throw ConfigError("every mass pair needs M1 > 0");
        }
        if (mp.m2 == 0.0) {
            throw ConfigError("every mass pair needs M2 != 0");
        }
    }
    if (c.m.empty()) {
        throw ConfigError("m list is empty");
    }
    if (!(c.hbar > 0.0)) {
        throw ConfigError("hbar must be positive");
    }
    if (!(c.Omega >= 0.0)) {
        throw ConfigError("Omega must be nonnegative");
    }
    for (int n : c.n) {
        if (n < 0) {
            throw ConfigError("n must be nonnegative");
        }
    }
    if (c.n1_form != "exact" && c.n1_form != "published") {
        throw ConfigError("n1_form must be 'exact' or 'published'");
    }
    if (c.grid.N < 3 || c.grid.N % 2 == 0) {
        throw ConfigError("grid N must be odd and >= 3");
    }
    if (c.grid.L && !(*c.grid.L > 0.0)) {
        throw ConfigError("grid L must be positive");
    }
    if (c.parallel < 1) {
        throw ConfigError("parallel must be >= 1");
    }
}

/// HELIX_SPECTRA_THREADS, when set to a positive integer, overrides the configured count.
inline int resolve_threads(int configured)
{
    if (const char* env = std::getenv("HELIX_SPECTRA_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) {
                return v;
            }
        } catch (const std::exception&) {
        }
        throw ConfigError("HELIX_SPECTRA_THREADS must be a positive integer");
    }
    return configured;
}

} // namespace helix::cli
