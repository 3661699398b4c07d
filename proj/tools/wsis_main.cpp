#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsis/config.hpp"
#include "wsis/errors.hpp"
#include "wsis/runner.hpp"
#include "wsis/textio.hpp"

namespace {

wsis::config::RunConfig assemble(const std::string& preset,
                                 const std::vector<std::string>& config_paths,
                                 const std::string& out_dir, bool seed_given, std::uint64_t seed,
                                 bool seed_overrides_scenarios) {
    wsis::config::RunConfig cfg = wsis::config::default_config();
    if (!preset.empty()) wsis::config::apply_preset(cfg, preset);
    for (const auto& path : config_paths)
        wsis::config::apply_json(cfg, wsis::textio::read_file(path));
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed_given) {
        cfg.seeds = {seed};
        if (seed_overrides_scenarios)
            for (auto& s : cfg.wind.scenarios) s.seed = seed;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wind-plus-storage system simulator and hierarchical control toolkit"};
    app.require_subcommand(1);

    std::vector<std::string> config_paths;
    std::string preset;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;

    app.add_option("--config", config_paths,
                   "JSON config file (repeatable for compare; later keys win within a file)");
    app.add_option("--preset", preset, "configuration preset applied before the file: desk|paper");
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    app.add_option("--seed", seed, "replace the config's seed list with this single seed")
        ->each([&seed_given](const std::string&) { seed_given = true; });

    auto* train =
        app.add_subcommand("train", "train the configured method and write logs + checkpoints");
    auto* evaluate = app.add_subcommand(
        "evaluate", "greedy rollouts from checkpoints (the mpc baseline needs none)");
    auto* compare = app.add_subcommand(
        "compare", "train and evaluate several methods, reporting relative to the mpc baseline");
    auto* sweep =
        app.add_subcommand("sweep", "repeat train+evaluate across one config parameter's values");
    auto* synth = app.add_subcommand("synth-wind", "write each scenario's wind series as CSV");
    for (auto* sub : {train, evaluate, compare, sweep, synth}) sub->fallthrough();

    std::string sweep_param;
    std::vector<double> sweep_values;
    sweep->add_option("--param", sweep_param, "dotted config path, e.g. env.beta1");
    sweep->add_option("--values", sweep_values, "comma-separated parameter values")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        auto single = [&](bool seed_overrides_scenarios) {
            if (config_paths.size() > 1)
                throw wsis::ConfigError("this command takes at most one --config");
            return assemble(preset, config_paths, out_dir, seed_given, seed,
                            seed_overrides_scenarios);
        };

        if (*train) return wsis::runner::cmd_train(single(false));
        if (*evaluate) return wsis::runner::cmd_evaluate(single(false));
        if (*compare) {
            std::vector<wsis::config::RunConfig> cfgs;
            if (config_paths.empty()) {
                cfgs.push_back(single(false));
            } else {
                for (const auto& path : config_paths)
                    cfgs.push_back(assemble(preset, {path}, out_dir, seed_given, seed, false));
            }
            return wsis::runner::cmd_compare(cfgs);
        }
        if (*sweep) {
            auto cfg = single(false);
            if (!sweep_param.empty()) cfg.sweep.parameter = sweep_param;
            if (!sweep_values.empty()) cfg.sweep.values = sweep_values;
            return wsis::runner::cmd_sweep(cfg);
        }
        if (*synth) return wsis::runner::cmd_synth_wind(single(true));
    } catch (const wsis::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const wsis::IngestionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
