#include "qslink/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "qslink/analytic.hpp"
#include "qslink/channel.hpp"
#include "qslink/config_io.hpp"
#include "qslink/errors.hpp"
#include "qslink/simulator.hpp"

namespace qslink {

void SweepSpec::validate() const {
    if (values.empty()) throw config_error("sweep: no values given");
    for (size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw config_error("sweep: values must be strictly increasing");
    if (trials < 1) throw config_error("sweep: trials must be >= 1");
}

SweepSpec::Axis parse_sweep_axis(const std::string& name) {
    if (name == "w_z") return SweepSpec::Axis::w_z;
    if (name == "sigma_p") return SweepSpec::Axis::sigma_p;
    if (name == "N_ar_side") return SweepSpec::Axis::N_ar_side;
    if (name == "mu_bg") return SweepSpec::Axis::mu_bg;
    throw config_error("sweep: unknown parameter '" + name +
                       "' (expected w_z, sigma_p, N_ar_side, or mu_bg)");
}

std::string axis_name(SweepSpec::Axis axis) {
    switch (axis) {
        case SweepSpec::Axis::w_z: return "w_z";
        case SweepSpec::Axis::sigma_p: return "sigma_p";
        case SweepSpec::Axis::N_ar_side: return "N_ar_side";
        case SweepSpec::Axis::mu_bg: return "mu_bg";
    }
    throw config_error("sweep: bad axis");
}

namespace {

// Reuses the config-value parser so sweep tokens accept the same unit suffixes.
double parse_token(const std::string& token, SweepSpec::Axis axis) {
    SystemConfig probe;
    const bool length = axis == SweepSpec::Axis::w_z || axis == SweepSpec::Axis::sigma_p;
    const std::string key = length ? "w_z" : "mu_t";
    apply_override(probe, key + "=" + token);
    return length ? probe.w_z : probe.mu_t;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

} // namespace

std::vector<double> parse_sweep_values(const std::string& spec, SweepSpec::Axis axis) {
    if (spec.empty()) throw config_error("sweep: empty value list");
    std::vector<double> out;
    if (const auto parts = split(spec, ':'); parts.size() == 3) {
        const double start = parse_token(parts[0], axis);
        const double step = parse_token(parts[1], axis);
        const double stop = parse_token(parts[2], axis);
        if (!(step > 0)) throw config_error("sweep: step must be positive");
        for (double v = start; v <= stop + 1e-9 * step; v += step) out.push_back(v);
        if (out.empty()) throw config_error("sweep: empty range " + spec);
        return out;
    }
    for (const std::string& tok : split(spec, ','))
        out.push_back(parse_token(tok, axis));
    return out;
}

SystemConfig apply_sweep_value(const SystemConfig& base, SweepSpec::Axis axis,
                               double value) {
    SystemConfig cfg = base;
    switch (axis) {
        case SweepSpec::Axis::w_z: cfg.w_z = value; break;
        case SweepSpec::Axis::sigma_p: cfg.sigma_p = value; break;
        case SweepSpec::Axis::N_ar_side: {
            const int side = static_cast<int>(std::llround(value));
            if (side < 1 || std::abs(side - value) > 1e-9)
                throw config_error("sweep: N_ar_side values must be positive integers");
            cfg.N_arx = side;
            cfg.N_ary = side;
            break;
        }
        case SweepSpec::Axis::mu_bg: cfg.mu_bg = value; break;
    }
    return cfg;
}

std::vector<SweepRow> run_sweep(const SystemConfig& base, const SweepSpec& spec,
                                int parallelism) {
    spec.validate();
    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size());
    for (double v : spec.values) {
        SweepRow row;
        row.value = v;
        try {
            SystemConfig cfg = base;
            for (const std::string& ov : spec.overrides) apply_override(cfg, ov);
            cfg = apply_sweep_value(cfg, spec.axis, v); // the axis always wins
            const LinkModel model = LinkModel::build(cfg);

            const QuadratureSpec quad;
            const DistributionTable ps = p_nsig_table(model, quad);
            const DistributionTable pb = p_nbg_table(model);
            const int nt = n_t_min(model);
            row.e_nsig = ps.mean();
            const SyncErrorResult sync =
                sync_error_from_tables(ps, pb, nt, cfg.sigma_spad, cfg.t_qb);
            row.std_nch_analytic = sync.std_dev;
            row.outage_analytic = outage_from_tables(ps, pb, nt);

            const CampaignStats mc = run_campaign(model, spec.trials, spec.seed, parallelism);
            row.std_nch_mc = mc.nch_std;
            row.std_nch_mc_lo = mc.nch_std_ci_lo;
            row.std_nch_mc_hi = mc.nch_std_ci_hi;
            row.outage_mc = mc.empirical_outage;
            row.outage_mc_lo = mc.outage_ci_lo;
            row.outage_mc_hi = mc.outage_ci_hi;
            row.alignment_rate = mc.alignment_success_rate;
            row.delta_std = mc.nch_std - sync.std_dev;
            row.delta_outage = mc.empirical_outage - row.outage_analytic;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace qslink
