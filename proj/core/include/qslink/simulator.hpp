#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qslink/analytic.hpp"
#include "qslink/channel.hpp"
#include "qslink/rng.hpp"

namespace qslink {

// One qubit slot's outcome, for inspection and invariant tests. Campaigns use
// the same draw path over compact buffers; records are materialized on demand.
struct SlotRecord {
    enum class Provenance : std::uint8_t { none, signal, background };

    std::int64_t global_slot = 0; // 0 .. L_seq-1
    int grid_index = 0;           // cell j the beam dwells on during this slot
    std::int8_t ref_bit = -1;     // -1 = null (slot filtered out)
    double ref_time = 0;
    std::int8_t rx_bit = -1;      // -1 = null (no detection)
    double rx_time = 0;
    Provenance provenance = Provenance::none; // hidden analysis flag
};

struct TrialResult {
    int n_sig = 0;
    int n_bg = 0;
    int n_tot = 0;
    int shift_true = 0;
    int shift_est = -1;    // -1 when alignment was not attempted or failed
    double t_ch_hat = 0;   // valid only when aligned
    double n_ch = 0;       // t_ch_hat - t_ch_true, valid only when aligned
    bool outage = false;   // n_tot < threshold
    bool aligned = false;  // alignment recovered the true shift
};

struct CampaignStats {
    std::int64_t trials = 0;
    DistributionTable nsig_histogram; // pmf over observed N_sig
    double empirical_outage = 0;
    double outage_ci_lo = 0, outage_ci_hi = 0;     // 95% Wilson interval
    double nch_mean = 0, nch_mean_ci_lo = 0, nch_mean_ci_hi = 0;
    double nch_std = 0, nch_std_ci_lo = 0, nch_std_ci_hi = 0; // 95% chi-square CI
    double alignment_success_rate = 0; // among non-outage trials
    std::int64_t non_outage_trials = 0;
    std::int64_t aligned_trials = 0;
};

// Dense reference sequence: bit -1 means the slot was filtered to null.
struct RefSequence {
    std::vector<std::int8_t> bits;
    std::vector<double> times; // valid only where bits >= 0
    std::int64_t n_valid = 0;
};

// One receiver detection, indexed by the slot it appears in at the receiver
// (generation slot + true shift).
struct RxEvent {
    std::int64_t rx_slot = 0;
    int grid_index = 0;
    std::int8_t bit = 0;
    double time = 0;
    SlotRecord::Provenance provenance = SlotRecord::Provenance::none;
};

// Reusable per-thread buffers so campaign trials do not reallocate.
struct TrialWorkspace {
    RefSequence ref;
    std::vector<RxEvent> events;
    std::vector<double> mu_ch;  // per-cell rate for the current realization
    std::vector<double> p_sig;  // per-cell detection probability
};

// Slot loop: n_t ~ Poisson(mu_t); exactly one pair -> fair bit and timestamp
// slot*t_qb + N(0, sigma_spad^2); otherwise null.
void generate_reference(const LinkModel& model, RngStream& rng, RefSequence& out);

// For each valid reference slot in cell j: signal fires with 1 - e^{-mu_ch,j}
// (timestamp + t_ch_true + jitter, bit flipped with P_pol); else background
// fires with mu_bg e^{-mu_bg} (uniform in-slot arrival, fair bit). Signal wins
// joint events. Emits rx-indexed events shifted by shift_true.
void propagate_and_detect(const LinkModel& model, const ChannelRealization& real,
                          const RefSequence& ref, int shift_true, RngStream& rng,
                          std::vector<RxEvent>& out);

// Argmax over k in [0, delta_n_max] of matching-bit count against the shifted
// reference (ties toward smaller k). nullopt when every shift overlaps fewer
// than n_s_min non-null slots.
std::optional<int> align_sequences(const RefSequence& ref,
                                   const std::vector<RxEvent>& events,
                                   int delta_n_max, int n_s_min);

// Mean of (rx_time - ref_time) over events whose de-shifted slot is valid.
// first = t_ch_hat, second = number of events used. Requires at least one event.
std::pair<double, std::int64_t> estimate_delay(const RefSequence& ref,
                                               const std::vector<RxEvent>& events,
                                               int shift_est);

// Full protocol once: channel draw, reference, propagation, alignment,
// estimation, outage per the threshold rule. Alignment failures are recorded
// in the result, never thrown.
TrialResult run_trial(const LinkModel& model, RngStream& rng, TrialWorkspace& ws);
TrialResult run_trial(const LinkModel& model, RngStream& rng);

// Same draw path, materializing every slot's record (tests/inspection).
std::vector<SlotRecord> run_trial_records(const LinkModel& model, RngStream& rng,
                                          TrialResult* result = nullptr);

// n_trials independent trials on streams (master_seed, trial_index), executed
// on `parallelism` threads, aggregated in trial-index order: output is
// bit-identical for any parallelism degree.
std::vector<TrialResult> run_campaign_trials(const LinkModel& model,
                                             std::int64_t n_trials,
                                             std::uint64_t master_seed,
                                             int parallelism);

CampaignStats summarize_campaign(const std::vector<TrialResult>& trials);

CampaignStats run_campaign(const LinkModel& model, std::int64_t n_trials,
                           std::uint64_t master_seed, int parallelism);

} // namespace qslink
