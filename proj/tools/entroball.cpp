#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "entroball/commands.hpp"
#include "entroball/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Semi-discrete optimal transport and minimum cross-entropy "
                 "densities on Wasserstein balls"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool parallel_rows = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run-config JSON file")->required();
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "override the config output directory");
    };

    CLI::App* transport = app.add_subcommand(
        "transport", "optimal transport from the prior to the empirical measure");
    add_common(transport);
    CLI::App* mincross = app.add_subcommand(
        "mincross", "minimum cross-entropy density in the Wasserstein ball");
    add_common(mincross);
    CLI::App* sweep = app.add_subcommand("sweep", "mincross runs over a delta list");
    add_common(sweep);
    sweep->add_flag("--parallel-rows", parallel_rows, "solve sweep rows concurrently");

    CLI11_PARSE(app, argc, argv);

    try {
        entroball::RunConfig cfg = entroball::load_config(config_path);
        if (seed_set) cfg.seed = seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (transport->parsed()) return entroball::cmd_transport(cfg);
        if (mincross->parsed()) return entroball::cmd_mincross(cfg);
        return entroball::cmd_sweep(cfg, parallel_rows);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
