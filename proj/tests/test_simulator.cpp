#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "qslink/errors.hpp"
#include "qslink/simulator.hpp"
#include "qslink/stats.hpp"

using namespace qslink;

namespace {

LinkModel defaults() { return LinkModel::build(SystemConfig{}); }

LinkModel noiseless() {
    SystemConfig cfg;
    cfg.sigma_spad = 0.0;
    cfg.mu_bg = 0.0;
    cfg.P_pol = 0.0;
    return LinkModel::build(cfg);
}

// tiny scenario (20 slots in 4 cells) for slot-level boundary checks
LinkModel tiny() {
    SystemConfig cfg;
    cfg.N_grx = 2;
    cfg.N_gry = 2;
    cfg.t_j = 5e-9;
    cfg.t_aq = 20e-9;
    return LinkModel::build(cfg);
}

ChannelRealization flat_channel(const LinkModel& m, double h, Vec2 dev = {}) {
    ChannelRealization real;
    real.r_dev = dev;
    real.n_ar = m.der.N_ar;
    real.n_gr = m.der.N_gr;
    real.fading.assign(static_cast<size_t>(real.n_ar) * real.n_gr, h);
    return real;
}

RefSequence make_ref(std::int64_t l_seq, const std::vector<std::int64_t>& valid,
                     double t_qb = 1e-9) {
    RefSequence ref;
    ref.bits.assign(l_seq, -1);
    ref.times.assign(l_seq, 0.0);
    for (size_t k = 0; k < valid.size(); ++k) {
        ref.bits[valid[k]] = static_cast<std::int8_t>(k % 2);
        ref.times[valid[k]] = static_cast<double>(valid[k]) * t_qb;
        ++ref.n_valid;
    }
    return ref;
}

} // namespace

TEST_CASE("reference sequence: validity rate, fair bits, timestamp jitter") {
    const LinkModel m = defaults();
    RngStream rng(0x1234, 0);
    RefSequence ref;
    std::int64_t valid = 0, ones = 0, total = 0;
    double jit2 = 0;
    for (int rep = 0; rep < 10; ++rep) {
        generate_reference(m, rng, ref);
        REQUIRE(static_cast<std::int64_t>(ref.bits.size()) == m.der.L_seq);
        std::int64_t seen = 0;
        for (std::int64_t s = 0; s < m.der.L_seq; ++s) {
            if (ref.bits[s] < 0) continue;
            ++seen;
            ones += ref.bits[s];
            const double jit = ref.times[s] - static_cast<double>(s) * m.cfg.t_qb;
            jit2 += jit * jit;
        }
        CHECK(seen == ref.n_valid);
        valid += seen;
        total += m.der.L_seq;
    }
    const double rate = static_cast<double>(valid) / static_cast<double>(total);
    CHECK(rate == doctest::Approx(m.der.lambda_slot).epsilon(0.007));
    CHECK(static_cast<double>(ones) / valid == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::sqrt(jit2 / valid) == doctest::Approx(m.cfg.sigma_spad).epsilon(0.05));
}

TEST_CASE("zero detector jitter pins reference timestamps to the slot clock") {
    const LinkModel m = noiseless();
    RngStream rng(0x9, 0);
    RefSequence ref;
    generate_reference(m, rng, ref);
    for (std::int64_t s = 0; s < m.der.L_seq; ++s) {
        if (ref.bits[s] < 0) continue;
        CHECK(ref.times[s] == static_cast<double>(s) * m.cfg.t_qb);
    }
}

TEST_CASE("slot validity is independent Bernoulli down to the first slot") {
    const LinkModel m = tiny(); // 20 slots per acquisition
    REQUIRE(m.der.L_seq == 20);
    RngStream rng(0x51, 0);
    RefSequence ref;
    const int reps = 40000;
    std::int64_t first = 0, pairs = 0, both = 0, any = 0;
    for (int rep = 0; rep < reps; ++rep) {
        generate_reference(m, rng, ref);
        if (ref.bits[0] >= 0) ++first;
        for (int s = 0; s + 1 < 20; ++s) {
            ++pairs;
            const bool a = ref.bits[s] >= 0, b = ref.bits[s + 1] >= 0;
            any += a;
            both += a && b;
        }
    }
    const double p = m.der.lambda_slot;
    // slot 0 reachable at the full validity rate (no off-by-one at the origin)
    CHECK(static_cast<double>(first) / reps == doctest::Approx(p).epsilon(0.04));
    // adjacent slots uncorrelated: P(both) = p^2; a hop mis-step would leave
    // consecutive valid slots impossible (correlation -p/(1-p), far from 0)
    const double p_pair = static_cast<double>(both) / pairs;
    CHECK(p_pair == doctest::Approx(p * p).epsilon(0.04));
    CHECK(static_cast<double>(any) / pairs == doctest::Approx(p).epsilon(0.02));
}

TEST_CASE("noiseless propagation copies bits and shifts times exactly") {
    const LinkModel m = noiseless();
    RngStream rng(0x77, 1);
    RefSequence ref;
    generate_reference(m, rng, ref);
    const ChannelRealization real = flat_channel(m, 1.0);
    std::vector<RxEvent> events;
    const int shift = 3;
    propagate_and_detect(m, real, ref, shift, rng, events);
    REQUIRE(events.size() > 0);
    const double t_ch = m.der.t_ch_true;
    for (const RxEvent& e : events) {
        const std::int64_t s = e.rx_slot - shift;
        REQUIRE(s >= 0);
        REQUIRE(s < m.der.L_seq);
        CHECK(ref.bits[s] == e.bit);
        CHECK(e.time == static_cast<double>(s) * m.cfg.t_qb + t_ch);
        CHECK(e.provenance == SlotRecord::Provenance::signal);
        CHECK(e.grid_index == static_cast<int>(s / m.der.L_sv));
    }
}

TEST_CASE("per-cell signal counts follow the per-cell detection rates") {
    SystemConfig cfg;
    cfg.mu_bg = 0.0; // signal only
    const LinkModel m = LinkModel::build(cfg);
    RngStream rng(0xCE11, 2);
    const ChannelRealization real = sample_channel(m, rng);

    std::vector<double> expected(m.der.N_gr, 0.0);
    for (int j = 0; j < m.der.N_gr; ++j) {
        const double p_sig = -std::expm1(-mu_ch_slot(j, real, m));
        expected[j] = static_cast<double>(m.der.L_sv) * m.der.lambda_slot * p_sig;
    }

    const int reps = 30;
    std::vector<double> observed(m.der.N_gr, 0.0);
    RefSequence ref;
    std::vector<RxEvent> events;
    for (int rep = 0; rep < reps; ++rep) {
        generate_reference(m, rng, ref);
        propagate_and_detect(m, real, ref, 0, rng, events);
        for (const RxEvent& e : events) observed[e.grid_index] += 1.0;
    }
    // independent Poisson cells: compare z-scores against the known means
    double z2 = 0;
    double z_max = 0;
    int used = 0;
    for (int j = 0; j < m.der.N_gr; ++j) {
        const double e = reps * expected[j];
        if (e < 5.0) continue;
        const double z = (observed[j] - e) / std::sqrt(e);
        z2 += z * z;
        z_max = std::max(z_max, std::abs(z));
        ++used;
    }
    REQUIRE(used > 20);
    CHECK(z2 / used == doctest::Approx(1.0).epsilon(0.5));
    CHECK(z_max < 4.5);
}

TEST_CASE("background-only detection: gated arrivals with fair bits") {
    SystemConfig cfg;
    cfg.mu_bg = 0.5; // strong background so the test sees plenty of events
    const LinkModel m = LinkModel::build(cfg);
    RngStream rng(0xB6, 3);
    const ChannelRealization real = flat_channel(m, 1e-12); // dead signal path

    RefSequence ref;
    std::vector<RxEvent> events;
    std::int64_t n_events = 0, n_valid = 0, ones = 0;
    const double p_bg = 0.5 * std::exp(-0.5);
    const int shift = 5;
    for (int rep = 0; rep < 10; ++rep) {
        generate_reference(m, rng, ref);
        propagate_and_detect(m, real, ref, shift, rng, events);
        n_valid += ref.n_valid;
        n_events += static_cast<std::int64_t>(events.size());
        for (const RxEvent& e : events) {
            CHECK(e.provenance == SlotRecord::Provenance::background);
            ones += e.bit;
            const std::int64_t s = e.rx_slot - shift;
            const double gate_center = static_cast<double>(s) * m.cfg.t_qb + m.der.t_ch_true;
            CHECK(std::abs(e.time - gate_center) <= m.cfg.t_qb / 2);
        }
    }
    const double rate = static_cast<double>(n_events) / static_cast<double>(n_valid);
    CHECK(rate == doctest::Approx(p_bg).epsilon(0.02));
    CHECK(static_cast<double>(ones) / n_events == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("alignment recovers a planted shift and follows the tie/overlap rules") {
    RefSequence ref = make_ref(60, {0, 2, 4, 8, 10, 14, 16, 20, 24, 28, 30, 34, 40, 44, 50});
    std::vector<RxEvent> events;
    const int k_true = 5;
    for (std::int64_t s = 0; s < 60; ++s) {
        if (ref.bits[s] < 0) continue;
        RxEvent e;
        e.rx_slot = s + k_true;
        e.bit = ref.bits[s];
        events.push_back(e);
    }
    CHECK(align_sequences(ref, events, 7, 10) == 5);

    // corrupt a minority of bits: argmax unchanged
    std::vector<RxEvent> noisy = events;
    for (size_t i = 0; i < noisy.size(); i += 4) noisy[i].bit =
        static_cast<std::int8_t>(1 - noisy[i].bit);
    CHECK(align_sequences(ref, noisy, 7, 10) == 5);

    // all-ones reference makes every shift equal: ties resolve to the smallest
    RefSequence flat = make_ref(10, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    for (std::int64_t s = 0; s < 10; ++s) flat.bits[s] = 1;
    std::vector<RxEvent> one(1);
    one[0].rx_slot = 7;
    one[0].bit = 1;
    CHECK(align_sequences(flat, one, 7, 1) == 0);

    // overlap below n_s_min at every shift: no estimate
    CHECK_FALSE(align_sequences(flat, one, 7, 2).has_value());
}

TEST_CASE("delay estimation averages rx-ref gaps over usable events") {
    RefSequence ref = make_ref(20, {2, 5});
    ref.times[2] = 2e-9 + 1e-12;
    ref.times[5] = 5e-9 - 2e-12;
    const double t_ch = 3.3e-6;

    std::vector<RxEvent> events(3);
    events[0].rx_slot = 5; // de-shifted slot 2
    events[0].time = 2e-9 + t_ch;
    events[1].rx_slot = 8; // de-shifted slot 5
    events[1].time = 5e-9 + t_ch + 4e-12;
    events[2].rx_slot = 9; // de-shifted slot 6 is null: must be excluded
    events[2].time = 123.0;

    const auto [t_hat, used] = estimate_delay(ref, events, 3);
    CHECK(used == 2);
    const double want = ((t_ch - 1e-12) + (t_ch + 6e-12)) / 2;
    CHECK(t_hat == doctest::Approx(want).epsilon(1e-15));

    CHECK_THROWS_AS(estimate_delay(ref, events, 15), model_error);
}

TEST_CASE("a trial is a pure function of its stream") {
    const LinkModel m = defaults();
    RngStream a(0xAA, 17), b(0xAA, 17);
    const TrialResult ra = run_trial(m, a);
    const TrialResult rb = run_trial(m, b);
    CHECK(ra.n_sig == rb.n_sig);
    CHECK(ra.n_bg == rb.n_bg);
    CHECK(ra.shift_true == rb.shift_true);
    CHECK(ra.shift_est == rb.shift_est);
    CHECK(ra.t_ch_hat == rb.t_ch_hat);
    CHECK(ra.n_ch == rb.n_ch);
    CHECK(ra.outage == rb.outage);
    CHECK(ra.aligned == rb.aligned);
    CHECK(ra.shift_true >= 0);
    CHECK(ra.shift_true <= m.der.delta_N_max);
}

TEST_CASE("slot records stay consistent with the trial summary") {
    const LinkModel m = defaults();
    RngStream rng(0xAB, 4);
    TrialResult r;
    const std::vector<SlotRecord> recs = run_trial_records(m, rng, &r);
    REQUIRE(static_cast<std::int64_t>(recs.size()) == m.der.L_seq);

    int n_sig = 0, n_bg = 0;
    std::int64_t n_valid = 0;
    for (const SlotRecord& rec : recs) {
        CHECK(rec.grid_index == static_cast<int>(rec.global_slot / m.der.L_sv));
        if (rec.ref_bit >= 0) ++n_valid;
        if (rec.provenance == SlotRecord::Provenance::signal) ++n_sig;
        if (rec.provenance == SlotRecord::Provenance::background) ++n_bg;
        if (rec.rx_bit >= 0) {
            CHECK(rec.provenance != SlotRecord::Provenance::none);
            CHECK(rec.ref_bit >= 0); // detections only emerge from valid slots
        } else {
            CHECK(rec.provenance == SlotRecord::Provenance::none);
        }
    }
    CHECK(n_sig == r.n_sig);
    CHECK(n_bg == r.n_bg);
    CHECK(r.n_tot == r.n_sig + r.n_bg);
    CHECK(n_valid > 0);
}

TEST_CASE("noiseless end-to-end trials recover the shift and a zero offset") {
    const LinkModel m = noiseless();
    const std::vector<TrialResult> trials = run_campaign_trials(m, 300, 0xE2E, 1);
    int non_outage = 0;
    for (const TrialResult& t : trials) {
        if (t.outage) continue;
        ++non_outage;
        CHECK(t.aligned);
        CHECK(t.shift_est == t.shift_true);
        // every event time is within one ulp of slot + true delay, so the
        // averaged estimate cannot stray beyond ~1e-20 s
        CHECK(std::abs(t.n_ch) <= 1e-18);
    }
    CHECK(non_outage > 250);
}

TEST_CASE("a dead channel yields outages with no alignment attempt") {
    SystemConfig cfg;
    cfg.sigma_p = 10.0; // beam offset ~ meters: spatial weights underflow to 0
    cfg.mu_bg = 0.0;
    const LinkModel m = LinkModel::build(cfg);
    for (int t = 0; t < 10; ++t) {
        RngStream rng(0xD0A, static_cast<std::uint64_t>(t));
        const TrialResult r = run_trial(m, rng);
        CHECK(r.outage);
        CHECK(r.n_tot == 0);
        CHECK(r.shift_est == -1);
        CHECK_FALSE(r.aligned);
    }
}

TEST_CASE("campaign summary equals a hand aggregation of its trials") {
    const LinkModel m = defaults();
    const std::vector<TrialResult> trials = run_campaign_trials(m, 120, 0x5EED, 1);
    const CampaignStats s = summarize_campaign(trials);

    std::int64_t outages = 0, aligned = 0, non_outage = 0;
    double sum = 0;
    for (const TrialResult& t : trials) {
        if (t.outage) {
            ++outages;
            continue;
        }
        ++non_outage;
        if (!t.aligned) continue;
        ++aligned;
        sum += t.n_ch;
    }
    CHECK(s.trials == 120);
    CHECK(s.empirical_outage ==
          doctest::Approx(static_cast<double>(outages) / 120).epsilon(1e-15));
    CHECK(s.non_outage_trials == non_outage);
    CHECK(s.aligned_trials == aligned);
    REQUIRE(aligned >= 2);
    const double mean = sum / aligned;
    CHECK(s.nch_mean == doctest::Approx(mean).epsilon(1e-12));
    double ss = 0;
    for (const TrialResult& t : trials) {
        if (t.outage || !t.aligned) continue;
        ss += (t.n_ch - mean) * (t.n_ch - mean);
    }
    CHECK(s.nch_std == doctest::Approx(std::sqrt(ss / (aligned - 1))).epsilon(1e-12));
    CHECK(s.nsig_histogram.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.outage_ci_lo <= s.empirical_outage);
    CHECK(s.outage_ci_hi >= s.empirical_outage);

    CHECK_THROWS_AS(summarize_campaign({}), config_error);
}

TEST_CASE("campaign results are bit-identical across parallelism degrees") {
    const LinkModel m = defaults();
    const std::vector<TrialResult> serial = run_campaign_trials(m, 200, 42, 1);
    const std::vector<TrialResult> parallel = run_campaign_trials(m, 200, 42, 8);
    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].n_sig == parallel[i].n_sig);
        CHECK(serial[i].n_bg == parallel[i].n_bg);
        CHECK(serial[i].shift_est == parallel[i].shift_est);
        CHECK(serial[i].t_ch_hat == parallel[i].t_ch_hat);
        CHECK(serial[i].n_ch == parallel[i].n_ch);
        CHECK(serial[i].outage == parallel[i].outage);
        CHECK(serial[i].aligned == parallel[i].aligned);
    }
}

TEST_CASE("simulated counts and offsets track the closed-form law") {
    const LinkModel m = defaults();
    const CampaignStats s = run_campaign(m, 1500, 0xCAFE, 1);

    const QuadratureSpec quad;
    const DistributionTable analytic = p_nsig_table(m, quad);
    CHECK(tv_distance(s.nsig_histogram.mass, analytic.mass) < 0.25);

    // the estimator is unbiased: the mean offset CI must cover zero
    REQUIRE(s.aligned_trials > 1000);
    const double se = s.nch_std / std::sqrt(static_cast<double>(s.aligned_trials));
    CHECK(std::abs(s.nch_mean) < 2.8 * se);

    const double analytic_outage = outage_probability(m, quad);
    CHECK(s.outage_ci_lo - 0.01 <= analytic_outage);
    CHECK(s.outage_ci_hi + 0.01 >= analytic_outage);
}
