#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "qgp/errors.hpp"
#include "qgp/harness.hpp"

namespace {

void print_experiments() {
    std::cout << "experiments:\n";
    for (const auto& name : qgp::experiment_names())
        std::cout << "  " << name << "  (" << qgp::experiment_anchor(name) << ")\n";
    std::cout << "\nusage: qgplab <experiment> [--config f.json] [--out dir] [--seed u64] "
                 "[--threads n]\n"
                 "exit codes: 0 ok, 2 validation error, 3 resource cap, 4 numerical failure\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field three-body laboratory"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;

    std::vector<CLI::App*> subs;
    for (const auto& name : qgp::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, qgp::experiment_anchor(name));
        sub->add_option("--config", config_path, "flat JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "RNG seed recorded in every artifact")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", threads, "worker thread hint");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    if (app.get_subcommands().empty()) {
        print_experiments();
        return 0;
    }

    try {
        const std::string experiment = app.get_subcommands().front()->get_name();
        qgp::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = qgp::ExperimentConfig::from_json_file(config_path);
        cfg.experiment = experiment;
        if (seed_set) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        const auto files = qgp::run_experiment(cfg, out_dir);
        for (const auto& f : files) std::cout << f.string() << "\n";
        return 0;
    } catch (const qgp::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const qgp::ResourceError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const qgp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
