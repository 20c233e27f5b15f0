#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "riskloop/commands.hpp"

namespace {

void add_falsify_flags(CLI::App* cmd, riskloop::cli::FalsifyOptions& options) {
    cmd->add_option("--model", options.model_path, "risk model (.rkml)")->required();
    cmd->add_option("--scenario", options.scenario_path, "scenario config file")->required();
    cmd->add_option("--situation", options.situation, "situation to sample")->required();
    cmd->add_option("--event", options.event, "risk event under test")->required();
    cmd->add_option("--strategy", options.strategy, "search strategy: random | evolutionary")
        ->check(CLI::IsMember({"random", "evolutionary"}));
    cmd->add_option("--budget", options.budget, "episode budget")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", options.seed, "master seed (fanned out per stage)");
    cmd->add_flag("--early-stop", options.early_stop, "stop at the first violation");
    cmd->add_option("--workers", options.workers, "parallel episode workers (0 = cores)")
        ->envname("RISKLOOP_WORKERS");
    cmd->add_option("--out", options.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riskloop: risk-driven assurance for human-robot collaboration scenarios"};
    app.require_subcommand(1);

    std::string validate_model;
    CLI::App* validate = app.add_subcommand("validate", "parse and validate a risk model");
    validate->add_option("model", validate_model, "risk model (.rkml)")->required();

    riskloop::cli::FalsifyOptions falsify_options;
    CLI::App* falsify =
        app.add_subcommand("falsify", "search for constraint-violating configurations");
    add_falsify_flags(falsify, falsify_options);

    riskloop::cli::AnalyzeOptions analyze_options;
    CLI::App* analyze = app.add_subcommand("analyze", "apply evidence and emit the risk report");
    analyze->add_option("--model", analyze_options.model_path, "risk model (.rkml)")->required();
    analyze->add_option("--evidence", analyze_options.evidence_path, "evidence JSON")->required();
    analyze->add_option("--out", analyze_options.out_dir, "output directory");

    riskloop::cli::RunOptions run_options;
    CLI::App* run = app.add_subcommand(
        "run", "full loop: falsify, derive evidence, update the model, analyze");
    add_falsify_flags(run, run_options.falsify);
    run->add_option("--alpha", run_options.alpha, "credible mass level in (0, 1)");
    run->add_option("--grid", run_options.grid_resolution, "HDR grid resolution per dimension");
    run->add_option("--mc", run_options.mc_samples,
                    "uniform Monte-Carlo samples for the violation rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : riskloop::cli::kExitUsage;
    }

    if (validate->parsed()) {
        return riskloop::cli::cmd_validate(validate_model, std::cout, std::cerr);
    }
    if (falsify->parsed()) {
        return riskloop::cli::cmd_falsify(falsify_options, std::cout, std::cerr);
    }
    if (analyze->parsed()) {
        return riskloop::cli::cmd_analyze(analyze_options, std::cout, std::cerr);
    }
    return riskloop::cli::cmd_run(run_options, std::cout, std::cerr);
}
