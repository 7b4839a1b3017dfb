#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qslink/config.hpp"

namespace qslink {

// One figure-reproduction sweep: a recognized axis, ordered values, and the
// campaign settings shared by every point.
struct SweepSpec {
    enum class Axis { w_z, sigma_p, N_ar_side, mu_bg };

    Axis axis = Axis::w_z;
    std::vector<double> values;   // SI units; strictly increasing
    std::int64_t trials = 2000;
    std::uint64_t seed = 12345;
    std::vector<std::string> overrides; // "key=value", applied at every point

    void validate() const; // nonempty, strictly ordered
};

SweepSpec::Axis parse_sweep_axis(const std::string& name);
std::string axis_name(SweepSpec::Axis axis);

// Parses "start:step:stop" shorthand or a comma list; tokens accept the same
// unit suffixes as config values for length axes.
std::vector<double> parse_sweep_values(const std::string& spec, SweepSpec::Axis axis);

// Analytic prediction + campaign measurement at one swept value.
struct SweepRow {
    double value = 0;
    bool failed = false;
    std::string error;

    double e_nsig = 0;            // analytic E[N_sig]
    double std_nch_analytic = 0;  // s
    double outage_analytic = 0;

    double std_nch_mc = 0, std_nch_mc_lo = 0, std_nch_mc_hi = 0;
    double outage_mc = 0, outage_mc_lo = 0, outage_mc_hi = 0;
    double alignment_rate = 0;

    // agreement deltas: empirical - analytic
    double delta_std = 0;
    double delta_outage = 0;
};

// Runs analytic + campaign per value, rows in input order; per-point failures
// are recorded in the row and the sweep continues.
std::vector<SweepRow> run_sweep(const SystemConfig& base, const SweepSpec& spec,
                                int parallelism);

// Applies one swept value to a config (w_z, sigma_p, mu_bg set the field;
// N_ar_side sets N_arx = N_ary = round(value)).
SystemConfig apply_sweep_value(const SystemConfig& base, SweepSpec::Axis axis,
                               double value);

} // namespace qslink
