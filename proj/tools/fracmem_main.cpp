#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "fracmem/experiment.hpp"
#include "fracmem/version.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::int64_t seed = -1;
    bool seed_set = false;
    int workers = 1;
};

fracmem::ExperimentConfig build_config(const CliOptions& opt, const std::string& mode) {
    fracmem::ordered_json j = fracmem::ordered_json::object();
    if (!opt.config_path.empty()) j = fracmem::load_config_file(opt.config_path);
    j["mode"] = mode;
    for (const auto& assignment : opt.overrides) fracmem::apply_override(j, assignment);
    if (!opt.out_dir.empty()) {
        if (!j.contains("output") || !j["output"].is_object())
            j["output"] = fracmem::ordered_json::object();
        j["output"]["dir"] = opt.out_dir;
    }
    if (opt.seed_set) j["seed"] = opt.seed;
    return fracmem::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracmem: pseudospectral solver and decay-verification suite for the "
                 "damped fractional Klein-Gordon equation with nonlinear memory"};
    app.set_version_flag("--version", FRACMEM_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON configuration file");
    app.add_option("--set", opt.overrides,
                   "Override a config entry, e.g. --set solver.dt=0.01 (repeatable)")
        ->take_all();
    app.add_option("--out", opt.out_dir, "Output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", opt.seed, "Random seed (overrides config)");
    app.add_option("--workers", opt.workers, "Worker threads for sweep rows")
        ->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "Run one simulation and fit its decay");
    auto* verify = app.add_subcommand("verify-lemmas",
                                      "Certify the decay and interpolation inequalities");
    auto* sweep = app.add_subcommand("sweep", "Run the configured parameter sweep");
    auto* fit = app.add_subcommand("fit", "Fit decay rates from an existing trajectory CSV");

    CLI11_PARSE(app, argc, argv);
    opt.seed_set = seed_opt->count() > 0;

    try {
        if (simulate->parsed()) return fracmem::run_simulate(build_config(opt, "simulate"));
        if (verify->parsed())
            return fracmem::run_verify_lemmas(build_config(opt, "verify-lemmas"));
        if (sweep->parsed())
            return fracmem::run_sweep(build_config(opt, "sweep"), opt.workers);
        if (fit->parsed()) return fracmem::run_fit(build_config(opt, "fit"));
    } catch (const fracmem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
