// anchor_bandits: command-line front end.
//
//   anchor_bandits run   --config cfg.json --out-dir out [--seed n] [--runs n] [--horizon n]
//   anchor_bandits sweep --config cfg.json --param v --values 0,0.1,0.3 --out-dir out
//   anchor_bandits bound --config cfg.json [--out-dir dir]
//
// ANCHOR_BANDITS_THREADS caps the worker pool (unset or 0: all cores).

#include <anchor_bandits/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace anchor_bandits;

    CLI::App app{"Offline-to-online bandit simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment and write curves.csv, summary.csv, meta.json");
    run_cmd->add_option("--config", run.config, "Experiment config (JSON)")->required();
    run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->required();
    std::uint64_t seed = 0, runs = 0, horizon = 0;
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the master seed");
    auto* runs_opt = run_cmd->add_option("--runs", runs, "Override the number of replications");
    auto* horizon_opt = run_cmd->add_option("--horizon", horizon, "Override the horizon");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per parameter value");
    sweep_cmd->add_option("--config", sweep.config, "Base experiment config (JSON)")->required();
    sweep_cmd->add_option("--param", sweep.param, "offline_total | delta | v | K")->required();
    sweep_cmd->add_option("--values", sweep.values, "Comma-separated values, e.g. 0,0.1,0.3")->required();
    sweep_cmd->add_option("--out-dir", sweep.out_dir, "Output directory")->required();

    BoundOptions bound;
    auto* bound_cmd = app.add_subcommand("bound", "Evaluate the gap-dependent regret upper bound");
    bound_cmd->add_option("--config", bound.config, "Experiment config (JSON)")->required();
    bound_cmd->add_option("--out-dir", bound.out_dir, "Directory for bound.json (default: .)");
    bound_cmd->add_option("--constant-term", bound.params.constant_term, "Constant of the O(1/gap^2) term");
    bound_cmd->add_option("--optimal-log-offset", bound.params.optimal_log_offset,
                          "Log offset of the optimal-arm term (default e^32)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const unsigned threads = threads_from_env();
    if (*run_cmd) {
        if (*seed_opt) run.seed = seed;
        if (*runs_opt) run.runs = runs;
        if (*horizon_opt) run.horizon = horizon;
        run.threads = threads;
        return cmd_run(run, std::cerr);
    }
    if (*sweep_cmd) {
        sweep.threads = threads;
        return cmd_sweep(sweep, std::cerr);
    }
    return cmd_bound(bound, std::cout, std::cerr);
}
