// fhc: numerical laboratory for heat transport in an unpinned harmonic chain
// with momentum exchange and Langevin baths, and for its macroscopic
// fractional heat equation.

#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <iostream>

#include "fhc/commands.hpp"
#include "fhc/covariance.hpp"
#include "fhc/run_io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool threads_set = false;
    double tolerance_scale = 0.0;
    bool tol_set = false;
};

void add_common(CLI::App* app, CommonFlags& flags) {
    app->add_option("--config", flags.config_path, "JSON config file");
    app->add_option("--out", flags.out, "output directory");
    app->add_option("--seed", flags.seed, "root RNG seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    app->add_option("--threads", flags.threads, "worker count (speed only, never results)")
        ->each([&](const std::string&) { flags.threads_set = true; });
    app->add_option("--tolerance-scale", flags.tolerance_scale, "scale verification tolerances")
        ->each([&](const std::string&) { flags.tol_set = true; });
}

fhc::io::RunConfig build_config(const CommonFlags& flags) {
    fhc::io::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = fhc::io::RunConfig::from_file(flags.config_path);
    fhc::io::json overrides = fhc::io::json::object();
    if (!flags.out.empty()) overrides["out"] = flags.out;
    if (flags.seed_set) overrides["seed"] = flags.seed;
    if (flags.threads_set) overrides["threads"] = flags.threads;
    if (flags.tol_set) overrides["tolerance_scale"] = flags.tolerance_scale;
    cfg.merge(overrides);
    return cfg;
}

int run(const std::function<fhc::cmd::Outcome(fhc::io::RunConfig)>& fn, const CommonFlags& flags) {
    try {
        const auto outcome = fn(build_config(flags));
        if (!outcome.message.empty()) std::cout << outcome.message << "\n";
        return outcome.exit_code;
    } catch (const fhc::io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fhc::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fhc::cov::IntegratorError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic-chain heat transport laboratory"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string verify_level = "quick";

    auto* sim = app.add_subcommand("simulate", "ensemble Monte Carlo of the chain");
    add_common(sim, flags);
    auto* cov = app.add_subcommand("covariance", "deterministic second-moment evolution");
    add_common(cov, flags);
    auto* pde = app.add_subcommand("pde", "fractional heat equation solver");
    add_common(pde, flags);
    auto* ker = app.add_subcommand("kernels", "tabulate macroscopic kernels");
    add_common(ker, flags);
    auto* con = app.add_subcommand("converge", "chain-to-PDE convergence study");
    add_common(con, flags);
    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    add_common(ver, flags);
    ver->add_option("--level", verify_level, "quick|full");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return run(fhc::cmd::simulate, flags);
    if (cov->parsed()) return run(fhc::cmd::covariance, flags);
    if (pde->parsed()) return run(fhc::cmd::pde, flags);
    if (ker->parsed()) return run(fhc::cmd::kernels_table, flags);
    if (con->parsed()) return run(fhc::cmd::converge, flags);
    if (ver->parsed()) {
        return run(
            [&](fhc::io::RunConfig cfg) {
                fhc::io::json j;
                j["level"] = verify_level;
                cfg.merge(j);
                return fhc::cmd::verify(std::move(cfg));
            },
            flags);
    }
    return 1;
}
