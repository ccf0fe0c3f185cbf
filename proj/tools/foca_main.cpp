#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foca/commands.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config file (key = value under [section] headers)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--seed", args.seed, "Seed override (replaces run.seeds)")->each([&args](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--override", args.overrides, "Config override key=value (repeatable, wins over file values)");
}

foca::ExperimentConfig build_config(const CommonArgs& args) {
    foca::ExperimentConfig cfg;
    if (!args.config_path.empty())
        cfg = foca::ExperimentConfig::from_file(args.config_path);
    for (const auto& ov : args.overrides)
        cfg.apply_override(ov);
    if (args.seed_set) {
        cfg.seeds = {args.seed};
        cfg.train.seed = args.seed;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature-ODE caching solvers and experiment harness"};
    app.require_subcommand(1);

    CommonArgs train_args, sweep_args, prop1_args, dump_args;
    CLI::App* train = app.add_subcommand("train", "Train the toy denoiser and write versioned weights");
    add_common(train, train_args);
    CLI::App* sweep = app.add_subcommand("sweep", "Run (kind, N, seed) cells; writes steps.csv and summary.csv");
    add_common(sweep, sweep_args);
    CLI::App* prop1 = app.add_subcommand("prop1", "Verify the geometric error bound; writes prop1.json");
    add_common(prop1, prop1_args);
    CLI::App* dump = app.add_subcommand("dump", "Dump cached and uncached feature trajectories side by side");
    add_common(dump, dump_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return foca::cmd_train(build_config(train_args), train_args.out_dir);
        if (sweep->parsed())
            return foca::cmd_sweep(build_config(sweep_args), sweep_args.out_dir);
        if (prop1->parsed())
            return foca::cmd_prop1(build_config(prop1_args), prop1_args.out_dir);
        if (dump->parsed())
            return foca::cmd_dump(build_config(dump_args), dump_args.out_dir);
    } catch (const foca::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return foca::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return foca::kExitRuntimeError;
    }
    return foca::kExitConfigError;
}
