#include "qslink/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "qslink/errors.hpp"
#include "qslink/stats.hpp"
#include "qslink/variates.hpp"

namespace qslink {

namespace {

// Residual slot shift after the receiver pre-compensates the known part of the
// range (L_tar - pos_uncertainty). Lands in [0, delta_N_max] by construction.
int true_shift(const LinkModel& model) {
    const SystemConfig& c = model.cfg;
    const double slot = c.t_qb;
    const long long total = std::llround(model.der.t_ch_true / slot);
    const long long coarse =
        std::llround(2.0 * (c.L_tar - c.pos_uncertainty) / (c.speed_of_light * slot));
    return static_cast<int>(total - coarse);
}

// Per-cell detection rates for one channel realization, via the separable
// weight tables (two exp calls per axis entry instead of one per (i, j) pair).
void fill_rates(const LinkModel& model, const ChannelRealization& real,
                std::vector<double>& mu_ch, std::vector<double>& p_sig) {
    const int n_gr = model.der.N_gr;
    const int n_ar = model.der.N_ar;
    mu_ch.assign(n_gr, 0.0);
    p_sig.assign(n_gr, 0.0);
    const WeightTables wt = WeightTables::build(model, real.r_dev);
    const double c0 = model.der.c0;
    const double eta = model.cfg.eta_spad;
    for (int j = 0; j < n_gr; ++j) {
        const int jx = j % wt.n_grx;
        const int jy = j / wt.n_grx;
        double s = 0;
        for (int i = 0; i < n_ar; ++i) {
            const int ix = i % wt.n_arx;
            const int iy = i / wt.n_arx;
            s += real.h(i, j) * wt.wx[static_cast<size_t>(ix) * wt.n_grx + jx] *
                 wt.wy[static_cast<size_t>(iy) * wt.n_gry + jy];
        }
        const double p_rec = c0 * s;
        if (p_rec >= 1.0)
            throw model_error("single-slot reception probability reached 1; scenario invalid");
        mu_ch[j] = eta * p_rec;
        p_sig[j] = -std::expm1(-mu_ch[j]);
    }
}

} // namespace

void generate_reference(const LinkModel& model, RngStream& rng, RefSequence& out) {
    const auto l_seq = static_cast<std::int64_t>(std::llround(model.der.L_seq));
    out.bits.assign(l_seq, -1);
    out.times.resize(l_seq);
    out.n_valid = 0;
    // a slot survives the exactly-one-pair filter with probability mu_t e^{-mu_t}
    // (the Poisson count marginalized to an indicator); instead of one Bernoulli
    // per slot, hop between valid slots with geometric gaps at one draw each
    const double p_valid = model.der.lambda_slot;
    if (!(p_valid > 0.0)) return;
    const double t_qb = model.cfg.t_qb;
    const double sigma = model.cfg.sigma_spad;
    const double inv_log_q = 1.0 / std::log1p(-p_valid);
    std::int64_t s = -1;
    for (;;) {
        // gap mantissa comes from bits 11-63 of one engine word; bit 0 of the
        // same word, a disjoint bit range, supplies the fair reference bit
        std::uint64_t w;
        double u;
        do {
            w = rng.raw();
            u = static_cast<double>(w >> 11) * 0x1.0p-53;
        } while (u == 0.0);
        s += 1 + static_cast<std::int64_t>(std::log(u) * inv_log_q);
        if (s >= l_seq) break;
        out.bits[s] = static_cast<std::int8_t>(w & 1u);
        out.times[s] = static_cast<double>(s) * t_qb + rng.normal(sigma);
        ++out.n_valid;
    }
}

void propagate_and_detect(const LinkModel& model, const ChannelRealization& real,
                          const RefSequence& ref, int shift_true, RngStream& rng,
                          std::vector<RxEvent>& out) {
    out.clear();
    out.reserve(256);

    std::vector<double> mu_ch, p_sig;
    fill_rates(model, real, mu_ch, p_sig);

    const SystemConfig& cfg = model.cfg;
    const auto l_sv = static_cast<std::int64_t>(std::llround(model.der.L_sv));
    const double p_bg = cfg.mu_bg * std::exp(-cfg.mu_bg);
    const double t_qb = cfg.t_qb;
    const double t_ch = model.der.t_ch_true;

    const auto l_seq = static_cast<std::int64_t>(ref.bits.size());
    const int n_gr = static_cast<int>(p_sig.size());
    for (int j = 0; j < n_gr; ++j) {
        // one uniform decides the slot's fate: a detected pair claims [0, p_sig),
        // a background count the next (1 - p_sig) * p_bg, the rest is silence --
        // the same joint law as independent draws with the pair taking precedence
        const double p_sig_j = p_sig[j];
        const double p_any_j = p_sig_j + (1.0 - p_sig_j) * p_bg;
        const std::int64_t s_end = std::min(l_seq, (static_cast<std::int64_t>(j) + 1) * l_sv);
        for (std::int64_t s = j * l_sv; s < s_end; ++s) {
            if (ref.bits[s] < 0) continue; // null slots consume no randomness
            const double u = rng.uniform();
            if (u >= p_any_j) continue;
            RxEvent e;
            e.rx_slot = s + shift_true;
            e.grid_index = j;
            if (u < p_sig_j) {
                const double t_rx =
                    static_cast<double>(s) * t_qb + t_ch + rng.normal(cfg.sigma_spad);
                std::int8_t bit = ref.bits[s];
                if (rng.bernoulli(cfg.P_pol)) bit = static_cast<std::int8_t>(1 - bit);
                e.bit = bit;
                e.time = t_rx;
                e.provenance = SlotRecord::Provenance::signal;
            } else {
                // gate centered on the nominal arrival for this slot, arrival uniform in it
                e.time = static_cast<double>(s) * t_qb + t_ch + background_arrival(rng, t_qb);
                e.bit = rng.bernoulli(0.5) ? 1 : 0;
                e.provenance = SlotRecord::Provenance::background;
            }
            out.push_back(e);
        }
    }
}

std::optional<int> align_sequences(const RefSequence& ref,
                                   const std::vector<RxEvent>& events,
                                   int delta_n_max, int n_s_min) {
    const auto l_seq = static_cast<std::int64_t>(ref.bits.size());
    int best_k = -1;
    std::int64_t best_matches = -1;
    for (int k = 0; k <= delta_n_max; ++k) {
        std::int64_t overlap = 0, matches = 0;
        for (const RxEvent& e : events) {
            const std::int64_t r = e.rx_slot - k;
            if (r < 0 || r >= l_seq || ref.bits[r] < 0) continue;
            ++overlap;
            if (ref.bits[r] == e.bit) ++matches;
        }
        if (overlap < n_s_min) continue;
        if (matches > best_matches) { // strict: ties resolve to the smaller shift
            best_matches = matches;
            best_k = k;
        }
    }
    if (best_k < 0) return std::nullopt;
    return best_k;
}

std::pair<double, std::int64_t> estimate_delay(const RefSequence& ref,
                                               const std::vector<RxEvent>& events,
                                               int shift_est) {
    const auto l_seq = static_cast<std::int64_t>(ref.bits.size());
    double sum = 0;
    std::int64_t used = 0;
    for (const RxEvent& e : events) {
        const std::int64_t r = e.rx_slot - shift_est;
        if (r < 0 || r >= l_seq || ref.bits[r] < 0) continue;
        sum += e.time - ref.times[r];
        ++used;
    }
    if (used == 0) throw model_error("estimate_delay: no event maps to a valid slot");
    return {sum / used, used};
}

TrialResult run_trial(const LinkModel& model, RngStream& rng, TrialWorkspace& ws) {
    const ChannelRealization real = sample_channel(model, rng);
    TrialResult r;
    r.shift_true = true_shift(model);

    generate_reference(model, rng, ws.ref);
    propagate_and_detect(model, real, ws.ref, r.shift_true, rng, ws.events);

    for (const RxEvent& e : ws.events) {
        if (e.provenance == SlotRecord::Provenance::signal) ++r.n_sig;
        else ++r.n_bg;
    }
    r.n_tot = r.n_sig + r.n_bg;
    r.outage = r.n_tot < n_t_min(model);
    if (r.outage) return r;

    const std::optional<int> k =
        align_sequences(ws.ref, ws.events, model.der.delta_N_max, model.cfg.N_s_min);
    if (!k) return r;
    r.shift_est = *k;
    r.aligned = (*k == r.shift_true);
    const auto [t_hat, used] = estimate_delay(ws.ref, ws.events, *k);
    (void)used;
    r.t_ch_hat = t_hat;
    r.n_ch = t_hat - model.der.t_ch_true;
    return r;
}

TrialResult run_trial(const LinkModel& model, RngStream& rng) {
    TrialWorkspace ws;
    return run_trial(model, rng, ws);
}

std::vector<SlotRecord> run_trial_records(const LinkModel& model, RngStream& rng,
                                          TrialResult* result) {
    TrialWorkspace ws;
    const TrialResult r = run_trial(model, rng, ws);
    if (result) *result = r;

    const auto l_seq = static_cast<std::int64_t>(ws.ref.bits.size());
    const auto l_sv = static_cast<std::int64_t>(std::llround(model.der.L_sv));
    std::vector<SlotRecord> records(l_seq);
    for (std::int64_t s = 0; s < l_seq; ++s) {
        SlotRecord& rec = records[s];
        rec.global_slot = s;
        rec.grid_index = static_cast<int>(s / l_sv);
        rec.ref_bit = ws.ref.bits[s];
        rec.ref_time = rec.ref_bit >= 0 ? ws.ref.times[s] : 0.0;
    }
    for (const RxEvent& e : ws.events) {
        const std::int64_t s = e.rx_slot - r.shift_true; // origin slot of the gate
        SlotRecord& rec = records[s];
        rec.rx_bit = e.bit;
        rec.rx_time = e.time;
        rec.provenance = e.provenance;
    }
    return records;
}

std::vector<TrialResult> run_campaign_trials(const LinkModel& model,
                                             std::int64_t n_trials,
                                             std::uint64_t master_seed,
                                             int parallelism) {
    if (n_trials < 0) throw config_error("run_campaign_trials: n_trials must be >= 0");
    std::vector<TrialResult> results(n_trials);
    if (n_trials == 0) return results;
    const int workers = static_cast<int>(
        std::max<std::int64_t>(1, std::min<std::int64_t>(parallelism, n_trials)));

    if (workers == 1) {
        TrialWorkspace ws;
        for (std::int64_t t = 0; t < n_trials; ++t) {
            RngStream rng(master_seed, static_cast<std::uint64_t>(t));
            results[t] = run_trial(model, rng, ws);
        }
        return results;
    }

    // Work-stealing over trial indices; results land at their index, so the
    // aggregate is independent of scheduling and thread count.
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        TrialWorkspace ws;
        try {
            for (;;) {
                const std::int64_t t = next.fetch_add(1);
                if (t >= n_trials) return;
                RngStream rng(master_seed, static_cast<std::uint64_t>(t));
                results[t] = run_trial(model, rng, ws);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(n_trials); // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

CampaignStats summarize_campaign(const std::vector<TrialResult>& trials) {
    CampaignStats s;
    s.trials = static_cast<std::int64_t>(trials.size());
    if (trials.empty()) throw config_error("summarize_campaign: no trials");

    int max_nsig = 0;
    std::int64_t outages = 0;
    for (const TrialResult& t : trials) {
        max_nsig = std::max(max_nsig, t.n_sig);
        if (t.outage) ++outages;
    }
    s.nsig_histogram.kind = DistributionTable::Kind::pmf;
    s.nsig_histogram.support.resize(static_cast<size_t>(max_nsig) + 1);
    s.nsig_histogram.mass.assign(static_cast<size_t>(max_nsig) + 1, 0.0);
    for (size_t n = 0; n < s.nsig_histogram.support.size(); ++n)
        s.nsig_histogram.support[n] = static_cast<double>(n);
    const double inv = 1.0 / static_cast<double>(s.trials);
    for (const TrialResult& t : trials) s.nsig_histogram.mass[t.n_sig] += inv;

    s.empirical_outage = static_cast<double>(outages) * inv;
    const auto [oc_lo, oc_hi] = wilson_interval(outages, s.trials);
    s.outage_ci_lo = oc_lo;
    s.outage_ci_hi = oc_hi;

    // timing statistics over trials that locked onto the true shift
    double sum = 0;
    std::int64_t n_al = 0, n_no = 0;
    for (const TrialResult& t : trials) {
        if (t.outage) continue;
        ++n_no;
        if (!t.aligned) continue;
        ++n_al;
        sum += t.n_ch;
    }
    s.non_outage_trials = n_no;
    s.aligned_trials = n_al;
    s.alignment_success_rate = n_no > 0 ? static_cast<double>(n_al) / n_no : 0.0;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (n_al >= 1) {
        const double mean = sum / n_al;
        s.nch_mean = mean;
        if (n_al >= 2) {
            double ss = 0;
            for (const TrialResult& t : trials) {
                if (t.outage || !t.aligned) continue;
                ss += (t.n_ch - mean) * (t.n_ch - mean);
            }
            const double sd = std::sqrt(ss / (n_al - 1));
            s.nch_std = sd;
            const auto [m_lo, m_hi] = mean_interval(mean, sd, n_al);
            s.nch_mean_ci_lo = m_lo;
            s.nch_mean_ci_hi = m_hi;
            const auto [s_lo, s_hi] = std_interval(sd, n_al);
            s.nch_std_ci_lo = s_lo;
            s.nch_std_ci_hi = s_hi;
        } else { // a single aligned trial: the mean is that value, CI degenerate
            s.nch_mean_ci_lo = s.nch_mean_ci_hi = mean;
            s.nch_std = s.nch_std_ci_lo = s.nch_std_ci_hi = nan;
        }
    } else {
        s.nch_mean = s.nch_mean_ci_lo = s.nch_mean_ci_hi = nan;
        s.nch_std = s.nch_std_ci_lo = s.nch_std_ci_hi = nan;
    }
    return s;
}

CampaignStats run_campaign(const LinkModel& model, std::int64_t n_trials,
                           std::uint64_t master_seed, int parallelism) {
    return summarize_campaign(run_campaign_trials(model, n_trials, master_seed, parallelism));
}

} // namespace qslink
