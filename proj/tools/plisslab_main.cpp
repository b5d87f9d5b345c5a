#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plisslab/experiments.hpp"

int main(int argc, char** argv) {
    plisslab::ExperimentConfig cfg;
    if (const char* env_jobs = std::getenv("PLISS_LAB_JOBS")) {
        try {
            cfg.jobs = std::max(1, std::stoi(env_jobs));
        } catch (...) {
        }
    }

    CLI::App app{"plisslab: numerical experiments on expansion-time combinatorics and "
                 "SRB-type measure diagnostics for model diffeomorphisms"};
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file (flags override its keys)");
    // parse the config file first so that explicit flags win
    app.allow_config_extras(false);

    std::string model_flag, experiment_flag, out_flag;
    bool has_seed = false;
    std::uint64_t seed_flag = 0;
    app.add_option("--model", model_flag, "model name: cat2, cat3, solenoid, da2");
    app.add_option("--experiment", experiment_flag,
                   "experiment: lyapunov, chi-min, pliss, folner, gibbs, entropy, density, "
                   "bipliss, appendix, all");
    app.add_option("--out", out_flag, "output directory");
    auto* seed_opt = app.add_option("--seed", seed_flag, "64-bit PRNG seed");
    int jobs_flag = 0;
    auto* jobs_opt = app.add_option("--jobs", jobs_flag, "worker threads (default PLISS_LAB_JOBS)");
    bool self_test = false;
    app.add_flag("--self-test", self_test, "run the oracle-vs-fast self test where supported");

    long n_flag = 0, horizon_flag = 0, samples_flag = 0, orbit_flag = 0;
    int pmax_flag = 0, res_flag = 0, block_flag = 0, levels_flag = 0;
    double eps_flag = -1.0;
    auto* n_opt = app.add_option("--n", n_flag, "orbit horizon");
    auto* horizon_opt = app.add_option("--ensemble-horizon", horizon_flag, "Folner horizon N");
    auto* samples_opt = app.add_option("--disk-samples", samples_flag, "disk sample count");
    auto* orbit_opt = app.add_option("--orbit-len", orbit_flag, "entropy coding orbit length");
    auto* pmax_opt = app.add_option("--p-max", pmax_flag, "max cocycle power p");
    auto* res_opt = app.add_option("--resolution", res_flag, "grid resolution per dimension");
    auto* block_opt = app.add_option("--block-max", block_flag, "entropy block length");
    auto* levels_opt = app.add_option("--levels", levels_flag, "Folner level count");
    auto* eps_opt = app.add_option("--eps", eps_flag, "Gibbs/distortion epsilon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (!config_path.empty()) plisslab::load_config_file(config_path, cfg);
        if (!model_flag.empty()) cfg.model_name = model_flag;
        if (!experiment_flag.empty()) cfg.experiment = experiment_flag;
        if (!out_flag.empty()) cfg.out_dir = out_flag;
        if (seed_opt->count()) cfg.seed = seed_flag;
        if (jobs_opt->count()) cfg.jobs = jobs_flag;
        if (n_opt->count()) cfg.n = n_flag;
        if (horizon_opt->count()) cfg.ensemble_horizon = horizon_flag;
        if (samples_opt->count()) cfg.samples = samples_flag;
        if (orbit_opt->count()) cfg.orbit_len = orbit_flag;
        if (pmax_opt->count()) cfg.p_max = pmax_flag;
        if (res_opt->count()) cfg.resolution = res_flag;
        if (block_opt->count()) cfg.block_max = block_flag;
        if (levels_opt->count()) cfg.levels = levels_flag;
        if (eps_opt->count()) cfg.eps = eps_flag;
        cfg.self_test = self_test;
        (void)has_seed;
        if (cfg.experiment.empty())
            throw plisslab::UsageError(
                "no experiment selected; required keys: experiment (one of lyapunov, chi-min, "
                "pliss, folner, gibbs, entropy, density, bipliss, appendix, all), model");
        return plisslab::run(cfg);
    } catch (const plisslab::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
