#include "qslink/cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>

#include "qslink/analytic.hpp"
#include "qslink/channel.hpp"
#include "qslink/config_io.hpp"
#include "qslink/csv.hpp"
#include "qslink/errors.hpp"
#include "qslink/simulator.hpp"
#include "qslink/sweep.hpp"
#include "qslink/validate.hpp"

namespace qslink {

namespace {

// Finite values print; NaN prints as an empty cell (the CSV contract admits
// only finite numeric cells).
std::string cell(double v) { return std::isfinite(v) ? CsvWriter::num(v) : std::string(); }

std::string out_path(const CliOptions& opts, const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const model_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return exit_numeric;
    }
}

void write_distribution(const std::string& path, const DistributionTable& t,
                        const std::string& value_header) {
    CsvWriter csv(path);
    csv.row({"n", value_header});
    for (size_t i = 0; i < t.support.size(); ++i)
        csv.row({CsvWriter::num(static_cast<std::int64_t>(t.support[i])),
                 CsvWriter::num(t.mass[i])});
}

void write_derived(const std::string& path, const LinkModel& model) {
    const DerivedConstants& d = model.der;
    CsvWriter csv(path);
    csv.row({"name", "value"});
    auto put = [&](const std::string& k, double v) { csv.row({k, CsvWriter::num(v)}); };
    put("N_ar", d.N_ar);
    put("N_gr", d.N_gr);
    put("L_seq", d.L_seq);
    put("L_sv", d.L_sv);
    put("lambda_slot", d.lambda_slot);
    put("lambda_grid", d.lambda_grid);
    put("lambda_total", d.lambda_total);
    put("h_La", d.h_La);
    put("h_Lc", d.h_Lc);
    put("c0", d.c0);
    put("c_ab", d.c_ab);
    put("P_ap", d.P_ap);
    put("theta_dev", d.theta_dev);
    put("w_z2", d.w_z2);
    csv.row({"r0", d.r0 ? CsvWriter::num(*d.r0) : std::string()});
    put("t_ch_true", d.t_ch_true);
    put("delta_N_max", d.delta_N_max);
    put("prop1_valid", d.prop1_valid ? 1 : 0);
    put("n_t_min", n_t_min(model));
}

} // namespace

SystemConfig load_config(const CliOptions& opts) {
    SystemConfig cfg;
    if (!opts.config_path.empty()) cfg = parse_config_file(opts.config_path);
    for (const std::string& ov : opts.overrides) apply_override(cfg, ov);
    validate(cfg);
    return cfg;
}

int cmd_analytic(const CliOptions& opts) {
    return run_guarded([&] {
        const LinkModel model = LinkModel::build(load_config(opts));
        const QuadratureSpec quad;
        const DistributionTable ps = p_nsig_table(model, quad);
        const DistributionTable pb = p_nbg_table(model);
        const int nt = n_t_min(model);
        const SyncErrorResult sync =
            sync_error_from_tables(ps, pb, nt, model.cfg.sigma_spad, model.cfg.t_qb);
        const double outage = outage_from_tables(ps, pb, nt);

        write_derived(out_path(opts, "derived.csv"), model);
        write_distribution(out_path(opts, "p_nsig.csv"), ps, "p_nsig");
        write_distribution(out_path(opts, "p_nbg.csv"), pb, "p_nbg");
        {
            CsvWriter csv(out_path(opts, "analytic_summary.csv"));
            csv.row({"e_nsig", "e_nbg", "n_t_min", "std_nch_analytic",
                     "outage_analytic", "retained_mass", "low_confidence"});
            csv.row({CsvWriter::num(ps.mean()), CsvWriter::num(pb.mean()),
                     CsvWriter::num(nt), cell(sync.std_dev), CsvWriter::num(outage),
                     CsvWriter::num(sync.retained_mass),
                     CsvWriter::num(sync.low_confidence ? 1 : 0)});
        }

        std::printf("E[N_sig]        %.4f\n", ps.mean());
        std::printf("E[N_bg]         %.4f\n", pb.mean());
        std::printf("N_t,min         %d\n", nt);
        std::printf("sync STD        %.4f ps%s\n", sync.std_dev * 1e12,
                    sync.low_confidence ? "  (low confidence: conditioning mass < 0.5)" : "");
        std::printf("outage          %.6f\n", outage);
        std::printf("wrote derived.csv, p_nsig.csv, p_nbg.csv, analytic_summary.csv to %s\n",
                    opts.out_dir.c_str());
        return exit_ok;
    });
}

int cmd_simulate(const CliOptions& opts) {
    return run_guarded([&] {
        if (opts.trials < 1) throw config_error("simulate: --trials must be >= 1");
        const LinkModel model = LinkModel::build(load_config(opts));
        const std::vector<TrialResult> trials =
            run_campaign_trials(model, opts.trials, opts.seed, opts.parallelism);
        const CampaignStats stats = summarize_campaign(trials);

        {
            CsvWriter csv(out_path(opts, "trials.csv"));
            csv.row({"trial", "N_sig", "N_bg", "shift_est", "n_ch", "outage"});
            for (size_t t = 0; t < trials.size(); ++t) {
                const TrialResult& r = trials[t];
                const bool has_est = r.shift_est >= 0;
                csv.row({CsvWriter::num(static_cast<std::int64_t>(t)),
                         CsvWriter::num(r.n_sig), CsvWriter::num(r.n_bg),
                         has_est ? CsvWriter::num(r.shift_est) : std::string(),
                         has_est ? CsvWriter::num(r.n_ch) : std::string(),
                         CsvWriter::num(r.outage ? 1 : 0)});
            }
        }
        {
            CsvWriter csv(out_path(opts, "campaign_summary.csv"));
            csv.row({"trials", "empirical_outage", "outage_ci_lo", "outage_ci_hi",
                     "nch_mean", "nch_mean_ci_lo", "nch_mean_ci_hi", "nch_std",
                     "nch_std_ci_lo", "nch_std_ci_hi", "alignment_success_rate",
                     "non_outage_trials", "aligned_trials"});
            csv.row({CsvWriter::num(stats.trials), CsvWriter::num(stats.empirical_outage),
                     CsvWriter::num(stats.outage_ci_lo), CsvWriter::num(stats.outage_ci_hi),
                     cell(stats.nch_mean), cell(stats.nch_mean_ci_lo),
                     cell(stats.nch_mean_ci_hi), cell(stats.nch_std),
                     cell(stats.nch_std_ci_lo), cell(stats.nch_std_ci_hi),
                     CsvWriter::num(stats.alignment_success_rate),
                     CsvWriter::num(stats.non_outage_trials),
                     CsvWriter::num(stats.aligned_trials)});
        }
        write_distribution(out_path(opts, "nsig_hist.csv"), stats.nsig_histogram,
                           "frequency");

        std::printf("trials          %lld\n", static_cast<long long>(stats.trials));
        std::printf("outage          %.4f  [%.4f, %.4f]\n", stats.empirical_outage,
                    stats.outage_ci_lo, stats.outage_ci_hi);
        if (std::isfinite(stats.nch_std))
            std::printf("STD(n_ch)       %.4f ps  [%.4f, %.4f]\n", stats.nch_std * 1e12,
                        stats.nch_std_ci_lo * 1e12, stats.nch_std_ci_hi * 1e12);
        else
            std::printf("STD(n_ch)       n/a (fewer than 2 aligned trials)\n");
        std::printf("alignment rate  %.4f\n", stats.alignment_success_rate);
        std::printf("wrote trials.csv, campaign_summary.csv, nsig_hist.csv to %s\n",
                    opts.out_dir.c_str());
        return exit_ok;
    });
}

int cmd_sweep(const CliOptions& opts) {
    return run_guarded([&] {
        if (opts.sweep_param.empty() || opts.sweep_values.empty())
            throw config_error("sweep: --param and --values are required");
        if (opts.trials < 1) throw config_error("sweep: --trials must be >= 1");
        const SystemConfig base = load_config(opts);
        SweepSpec spec;
        spec.axis = parse_sweep_axis(opts.sweep_param);
        spec.values = parse_sweep_values(opts.sweep_values, spec.axis);
        spec.trials = opts.trials;
        spec.seed = opts.seed;
        const std::vector<SweepRow> rows = run_sweep(base, spec, opts.parallelism);

        {
            CsvWriter csv(out_path(opts, "sweep.csv"));
            csv.row({axis_name(spec.axis), "failed", "error", "e_nsig",
                     "std_nch_analytic", "outage_analytic", "std_nch_mc",
                     "std_nch_mc_lo", "std_nch_mc_hi", "outage_mc", "outage_mc_lo",
                     "outage_mc_hi", "alignment_rate", "delta_std", "delta_outage"});
            for (const SweepRow& r : rows) {
                if (r.failed) {
                    csv.row({CsvWriter::num(r.value), "1", CsvWriter::text(r.error),
                             "", "", "", "", "", "", "", "", "", "", ""});
                    continue;
                }
                csv.row({CsvWriter::num(r.value), "0", "", CsvWriter::num(r.e_nsig),
                         cell(r.std_nch_analytic), CsvWriter::num(r.outage_analytic),
                         cell(r.std_nch_mc), cell(r.std_nch_mc_lo), cell(r.std_nch_mc_hi),
                         CsvWriter::num(r.outage_mc), CsvWriter::num(r.outage_mc_lo),
                         CsvWriter::num(r.outage_mc_hi), CsvWriter::num(r.alignment_rate),
                         cell(r.delta_std), cell(r.delta_outage)});
            }
        }

        if (spec.axis == SweepSpec::Axis::w_z) {
            // waist minimizing the sync error STD at this scenario's sigma_p
            double best_ana = std::numeric_limits<double>::infinity(), wz_ana = 0;
            double best_mc = std::numeric_limits<double>::infinity(), wz_mc = 0;
            for (const SweepRow& r : rows) {
                if (r.failed) continue;
                if (std::isfinite(r.std_nch_analytic) && r.std_nch_analytic < best_ana) {
                    best_ana = r.std_nch_analytic;
                    wz_ana = r.value;
                }
                if (std::isfinite(r.std_nch_mc) && r.std_nch_mc < best_mc) {
                    best_mc = r.std_nch_mc;
                    wz_mc = r.value;
                }
            }
            CsvWriter csv(out_path(opts, "wz_optimum.csv"));
            csv.row({"sigma_p", "w_z_opt_analytic", "std_analytic", "w_z_opt_mc",
                     "std_mc"});
            csv.row({CsvWriter::num(base.sigma_p),
                     std::isfinite(best_ana) ? CsvWriter::num(wz_ana) : std::string(),
                     cell(best_ana),
                     std::isfinite(best_mc) ? CsvWriter::num(wz_mc) : std::string(),
                     cell(best_mc)});
        }

        int failed = 0;
        for (const SweepRow& r : rows) failed += r.failed ? 1 : 0;
        std::printf("swept %s over %zu values (%d point(s) failed)\n",
                    axis_name(spec.axis).c_str(), rows.size(), failed);
        std::printf("wrote sweep.csv%s to %s\n",
                    spec.axis == SweepSpec::Axis::w_z ? ", wz_optimum.csv" : "",
                    opts.out_dir.c_str());
        return exit_ok;
    });
}

int cmd_validate(const CliOptions& opts) {
    return run_guarded([&] {
        const LinkModel model = LinkModel::build(load_config(opts));
        const std::vector<CheckResult> checks = run_validation_suite(model);

        CsvWriter csv(out_path(opts, "validation.csv"));
        csv.row({"check", "pass", "measured", "tolerance", "detail"});
        bool all = true;
        for (const CheckResult& c : checks) {
            all = all && c.pass;
            csv.row({c.name, CsvWriter::num(c.pass ? 1 : 0), CsvWriter::num(c.measured),
                     CsvWriter::num(c.tolerance), CsvWriter::text(c.detail)});
            std::printf("[%s] %-28s measured %.5g (tolerance %.5g)\n",
                        c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                        c.tolerance);
        }
        std::printf("%s\n", all ? "all checks passed" : "validation FAILED");
        return all ? exit_ok : exit_validation;
    });
}

} // namespace qslink
