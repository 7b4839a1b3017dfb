#include <CLI11.hpp>

#include "qslink/cli_commands.hpp"

namespace {

void add_common(CLI::App* sub, qslink::CliOptions& opts) {
    sub->add_option("-c,--config", opts.config_path, "scenario file (key = value lines)")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opts.overrides,
                    "override one parameter, e.g. --set w_z=0.25m (repeatable)");
    sub->add_option("-o,--out", opts.out_dir, "output directory for CSV files")
        ->capture_default_str();
}

void add_campaign(CLI::App* sub, qslink::CliOptions& opts) {
    sub->add_option("-n,--trials", opts.trials, "Monte Carlo trials")
        ->capture_default_str();
    sub->add_option("--seed", opts.seed, "campaign master seed")->capture_default_str();
    sub->add_option("-j,--parallelism", opts.parallelism,
                    "worker threads (results are independent of this)")
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement-link clock-synchronization models: closed-form "
                 "performance evaluation and slot-level Monte Carlo"};
    app.require_subcommand(1);

    qslink::CliOptions opts;

    CLI::App* analytic = app.add_subcommand(
        "analytic", "evaluate the closed-form signal/background/error/outage models");
    add_common(analytic, opts);

    CLI::App* simulate =
        app.add_subcommand("simulate", "run a Monte Carlo campaign of full protocol trials");
    add_common(simulate, opts);
    add_campaign(simulate, opts);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "analytic + Monte Carlo across one swept parameter");
    add_common(sweep, opts);
    add_campaign(sweep, opts);
    sweep->add_option("-p,--param", opts.sweep_param,
                      "swept parameter: w_z, sigma_p, N_ar_side, or mu_bg")
        ->required();
    sweep->add_option("-v,--values", opts.sweep_values,
                      "values: comma list or start:step:stop (unit suffixes ok)")
        ->required();

    CLI::App* validate = app.add_subcommand(
        "validate", "fixed-seed oracle suite cross-checking models against sampling");
    add_common(validate, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return qslink::exit_usage;
    }

    if (analytic->parsed()) return qslink::cmd_analytic(opts);
    if (simulate->parsed()) return qslink::cmd_simulate(opts);
    if (sweep->parsed()) return qslink::cmd_sweep(opts);
    return qslink::cmd_validate(opts);
}
