// helix-spectra: effective potentials, closed-form spectra and their numeric
// cross-checks for an anisotropic-mass oscillator on a helicoid.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "helix/cli/commands.hpp"
#include "helix/cli/config.hpp"

namespace {

struct Overrides
{
    std::string config;
    std::string out;
    std::optional<double> hbar;
    std::optional<double> omega;
    std::optional<double> Omega;
    std::string masses;
    std::string m;
    std::string n;
    std::optional<double> grid_L;
    std::optional<std::size_t> grid_N;
    std::optional<int> parallel;
    std::string n1_form;
    std::string lines;
    std::string heun_params;
    std::string z;
    std::string window;
    bool m_given{false};
};

void add_common(CLI::App& sub, Overrides& o)
{
    sub.add_option("--config", o.config, "JSON run configuration");
    sub.add_option("--out", o.out, "output directory");
    sub.add_option("--hbar", o.hbar, "reduced Planck constant");
    sub.add_option("--omega", o.omega, "helicoid twist rate");
    sub.add_option("--Omega", o.Omega, "oscillator frequency");
    sub.add_option("--masses", o.masses, "mass pairs \"M1:M2[,M1:M2...]\"");
    sub.add_option("--m", o.m, "angular numbers, e.g. \"0..4\"");
    sub.add_option("--n", o.n, "radial degrees, e.g. \"1\" or \"0..2\"");
    sub.add_option("--grid-L", o.grid_L, "half width of the finite-difference box");
    sub.add_option("--grid-N", o.grid_N, "finite-difference grid points (odd)");
    sub.add_option("--parallel", o.parallel, "worker threads (HELIX_SPECTRA_THREADS wins)");
    sub.add_option("--n1-form", o.n1_form, "n = 1 energies: exact | published");
    sub.add_option("--window", o.window, "energy window lo:hi for n >= 2");
}

helix::cli::RunConfig resolve(const Overrides& o)
{
    using namespace helix::cli;
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (!o.out.empty()) c.out = o.out;
    if (o.hbar) c.hbar = *o.hbar;
    if (o.omega) c.omega = *o.omega;
    if (o.Omega) c.Omega = *o.Omega;
    if (!o.masses.empty()) c.masses = parse_masses(o.masses);
    if (o.m_given) c.m = parse_int_list(o.m);
    if (!o.n.empty()) c.n = parse_int_list(o.n);
    if (o.grid_L) c.grid.L = *o.grid_L;
    if (o.grid_N) c.grid.N = *o.grid_N;
    if (o.parallel) c.parallel = *o.parallel;
    if (!o.n1_form.empty()) c.n1_form = o.n1_form;
    if (!o.lines.empty()) c.lines_csv = o.lines;
    if (!o.heun_params.empty()) c.heun_params = parse_double_list(o.heun_params);
    if (!o.z.empty()) c.heun_z = parse_double_list(o.z);
    if (!o.window.empty()) c.window = parse_window(o.window);
    validate(c);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectra of an anisotropic-mass oscillator on a helicoid"};
    app.require_subcommand(1);

    Overrides o;
    auto* potential = app.add_subcommand("potential", "effective potential profiles and minima");
    auto* surface = app.add_subcommand("surface3d", "effective potential over the (rho, z) sheet");
    auto* spectrum = app.add_subcommand("spectrum", "closed-form and generic energy lines");
    auto* verify = app.add_subcommand("verify", "cross-check closed forms against the numeric solver");
    auto* heun = app.add_subcommand("heun", "evaluate the confluent Heun function");
    for (auto* sub : {potential, surface, spectrum, verify, heun}) {
        add_common(*sub, o);
    }
    verify->add_option("--lines", o.lines, "spectrum.csv to verify instead of recomputing");
    heun->add_option("--heun-params", o.heun_params, "alpha,beta,gamma,delta,eta");
    heun->add_option("--z", o.z, "comma-separated evaluation points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    o.m_given = app.get_subcommands().front()->count("--m") > 0;

    try {
        const helix::cli::RunConfig c = resolve(o);
        if (potential->parsed()) return helix::cli::cmd_potential(c, std::cout);
        if (surface->parsed()) return helix::cli::cmd_surface3d(c, o.m_given, std::cout);
        if (spectrum->parsed()) return helix::cli::cmd_spectrum(c, std::cout);
        if (verify->parsed()) return helix::cli::cmd_verify(c, std::cout);
        if (heun->parsed()) return helix::cli::cmd_heun(c, std::cout);
    } catch (const helix::cli::ConfigError& e) {
        std::cerr << "helix-spectra: " << e.what() << "\n";
        return 2;
    } catch (const helix::Error& e) {
        std::cerr << "helix-spectra: " << helix::to_string(e.code()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "helix-spectra: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
