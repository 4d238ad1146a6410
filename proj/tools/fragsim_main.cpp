#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fragsim/experiments.hpp"
#include "fragsim/statevector.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fragsim: fragmented spin-system simulation experiments"};
    app.require_subcommand(1);

    std::string config_path;
    fragsim::RunOptions options;
    std::uint64_t seed_value = 0;
    bool seed_given = false;

    const std::map<std::string, std::string> experiments = {{"evolve", "evolve"},
                                                            {"aux-rank", "aux_rank"},
                                                            {"vqe", "vqe"},
                                                            {"envelope", "envelope"},
                                                            {"pt-sweep", "pt_sweep"}};
    for (const auto& [name, experiment] : experiments) {
        CLI::App* cmd = app.add_subcommand(name, "run the " + experiment + " experiment");
        cmd->add_option("--config", config_path, "experiment config file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", options.out_dir, "output directory (default: .)");
        cmd->add_option("--seed", seed_value, "override the config seed")
            ->each([&seed_given](const std::string&) { seed_given = true; });
        cmd->add_flag("--full", options.full, "restore paper-scale ensemble sizes");
        cmd->add_option("--threads", options.threads, "worker threads for ensembles");
        cmd->add_flag("--svg", options.svg, "emit SVG line plots next to the CSVs");
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_given) options.seed = seed_value;

    try {
        const std::string chosen = app.get_subcommands().front()->get_name();
        fragsim::run_experiment_file(config_path, options, experiments.at(chosen));
    } catch (const fragsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fragsim::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
