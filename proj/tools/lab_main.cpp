#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "spherelab/experiments.hpp"
#include "spherelab/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spherelab experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 1;
    std::uint64_t budget = std::uint64_t(1) << 26;

    std::vector<CLI::App*> subs;
    for (const auto& name : spherelab::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "rng seed");
        sub->add_option("--budget-cells", budget, "grid-cell budget");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        spherelab::ExperimentConfig cfg;
        cfg.experiment = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) cfg.params = spherelab::io::read_kv(config_path);
        cfg.output_dir = out_dir;
        cfg.seed = seed;
        cfg.budget_cells = budget;

        const auto res = spherelab::run_experiment(cfg);
        for (const auto& line : res.report) std::cout << line << "\n";
        for (const auto& [name, fit] : res.fits)
            std::cout << "fit " << name << ": slope " << spherelab::io::shortest(fit.slope)
                      << " intercept " << spherelab::io::shortest(fit.intercept)
                      << " max_residual " << spherelab::io::shortest(fit.max_residual)
                      << "\n";
        std::cout << "wrote " << out_dir << "/results.csv and manifest.txt\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
