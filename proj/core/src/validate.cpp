#include "qslink/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qslink/analytic.hpp"
#include "qslink/errors.hpp"
#include "qslink/simulator.hpp"
#include "qslink/stats.hpp"
#include "qslink/variates.hpp"

namespace qslink {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

CheckResult make(const std::string& name, double measured, double tol, bool pass,
                 const std::string& detail) {
    CheckResult r;
    r.name = name;
    r.pass = pass;
    r.measured = measured;
    r.tolerance = tol;
    r.detail = detail;
    return r;
}

CheckResult bounded(const std::string& name, double measured, double tol,
                    const std::string& detail) {
    return make(name, measured, tol, measured <= tol, detail);
}

// Numeric CDF of the fading density by cumulative trapezoid; linear lookup.
struct GgCdf {
    std::vector<double> x, c;

    GgCdf(double alpha, double beta, double hi, int n) : x(n), c(n) {
        double acc = 0, prev = 0;
        for (int i = 0; i < n; ++i) {
            x[i] = hi * i / (n - 1);
            const double f = gg_pdf(x[i], alpha, beta);
            if (i > 0) acc += 0.5 * (f + prev) * (x[i] - x[i - 1]);
            prev = f;
            c[i] = acc;
        }
        for (double& v : c) v /= acc; // tail beyond hi folded in
    }

    double operator()(double v) const {
        if (v <= 0) return 0;
        if (v >= x.back()) return 1;
        const auto it = std::upper_bound(x.begin(), x.end(), v);
        const size_t i = it - x.begin();
        const double t = (v - x[i - 1]) / (x[i] - x[i - 1]);
        return c[i - 1] + t * (c[i] - c[i - 1]);
    }
};

// One draw of the single-cell reception probability P_rec,j at fixed offset.
double sample_p_rec_cell(const LinkModel& model, int j, Vec2 r_dev, RngStream& rng) {
    const WeightTables wt = WeightTables::build(model, r_dev);
    const int jx = j % wt.n_grx;
    const int jy = j / wt.n_grx;
    double s = 0;
    for (int i = 0; i < model.der.N_ar; ++i) {
        const int ix = i % wt.n_arx;
        const int iy = i / wt.n_arx;
        const double h = gg_sample(rng, model.cfg.alpha, model.cfg.beta);
        s += h * wt.wx[static_cast<size_t>(ix) * wt.n_grx + jx] *
             wt.wy[static_cast<size_t>(iy) * wt.n_gry + jy];
    }
    return model.der.c0 * s;
}

CheckResult check_hit_factor(const LinkModel& model) {
    if (!model.der.prop1_valid)
        return make("hit_factor_vs_quadrature", 0, 0.01, true,
                    "skipped: scenario outside the closed form's validity region");
    double worst = 0;
    const Vec2 devs[] = {{0, 0}, {0.1, -0.05}, {-0.2, 0.15}};
    for (const Vec2& dev : devs) {
        for (int i : {0, model.der.N_ar / 2, model.der.N_ar - 1}) {
            for (int j : {0, central_cell(model), model.der.N_gr - 1}) {
                const Vec2 center{model.grid.offsets[j].x + dev.x,
                                  model.grid.offsets[j].y + dev.y};
                const double oracle =
                    p_hit_oracle(model.array.positions[i], center, model.cfg.A_ar,
                                 model.cfg.w_z, 24) * model.der.P_ap;
                const double closed = p_hap(i, j, dev, model);
                worst = std::max(worst, std::abs(closed / oracle - 1.0));
            }
        }
    }
    return bounded("hit_factor_vs_quadrature", worst, 0.01,
                   "max relative error of the closed-form hit probability over "
                   "9 CCR/cell pairs x 3 pointing offsets");
}

CheckResult check_gg_moments(const LinkModel& model) {
    RngStream rng(0xA11CE, 1);
    const int n = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double h = gg_sample(rng, model.cfg.alpha, model.cfg.beta);
        s1 += h;
        s2 += h * h;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    const double err = std::max(std::abs(mean - 1.0),
                                std::abs(var - model.der.c_ab) / model.der.c_ab);
    return bounded("fading_moments", err, 0.03,
                   "sampled mean " + fmt(mean) + " (expect 1), variance " + fmt(var) +
                       " (expect " + fmt(model.der.c_ab) + "), 2e5 draws");
}

CheckResult check_gg_ks(const LinkModel& model) {
    RngStream rng(0xA11CE, 2);
    const int n = 20000;
    std::vector<double> samples(n);
    for (double& v : samples) v = gg_sample(rng, model.cfg.alpha, model.cfg.beta);
    const double hi = 12.0 * (1.0 + model.der.c_ab);
    const GgCdf cdf(model.cfg.alpha, model.cfg.beta, hi, 48000);
    const double d = ks_distance(std::move(samples), [&](double v) { return cdf(v); });
    return bounded("fading_ks", d, 0.015, "KS distance, 2e4 sampler draws vs pdf CDF");
}

CheckResult check_clt(const LinkModel& model, const std::string& name, double alpha,
                      double beta, double tol, const std::string& note,
                      std::uint64_t stream) {
    LinkModel m = model;
    m.cfg.alpha = alpha;
    m.cfg.beta = beta;
    m.der = derive_constants(m.cfg);
    const int j = central_cell(m);
    const Vec2 dev{0.3 * m.cfg.sigma_p + 0.05, 0.0};
    const GaussianMoments g = p_rec_conditional_moments(j, dev, m);

    RngStream rng(0xA11CE, stream);
    const int n = 50000;
    std::vector<double> samples(n);
    for (double& v : samples) v = sample_p_rec_cell(m, j, dev, rng);
    const double d = ks_distance(std::move(samples), [&](double v) {
        return 0.5 * std::erfc(-(v - g.mean) / (g.sd * std::sqrt(2.0)));
    });
    return bounded(name, d, tol, note);
}

CheckResult check_thinning(const LinkModel& model) {
    // per-dwell detected-count law: Binomial(L_sv, p) vs Poisson(L_sv p)
    const auto l_sv = static_cast<int>(std::llround(model.der.L_sv));
    double worst = 0;
    for (double p : {1e-4, 5e-4, 1e-3}) {
        const double lam = l_sv * p;
        double tv = 0;
        double logq = l_sv * std::log1p(-p); // log P(Binomial = 0)
        const double lr = std::log(p) - std::log1p(-p);
        for (int k = 0; k <= 30; ++k) {
            if (k > 0)
                logq += lr + std::log((l_sv - k + 1.0) / k);
            tv += std::abs(std::exp(logq) - poisson_pmf(k, lam));
        }
        worst = std::max(worst, 0.5 * tv);
    }
    return bounded("thinning_tv", worst, 1e-3,
                   "TV(Binomial(L_sv, p), Poisson(L_sv p)) for p up to 1e-3, n <= 30");
}

CheckResult check_background_mean(const LinkModel& model) {
    const double expect =
        model.der.lambda_total * model.cfg.mu_bg * std::exp(-model.cfg.mu_bg);
    if (expect == 0)
        return make("background_mean", 0, 0.1, true, "mu_bg = 0: nothing to measure");
    const auto trials = run_campaign_trials(model, 500, 0xA11CE, 1);
    double s = 0;
    for (const TrialResult& t : trials) s += t.n_bg;
    const double err = std::abs(s / trials.size() - expect) / expect;
    return bounded("background_mean", err, 0.10,
                   "mean N_bg " + fmt(s / trials.size()) + " vs " + fmt(expect) +
                       ", 500 trials");
}

CheckResult check_estimator_std(const LinkModel& model) {
    LinkModel m = model;
    m.cfg.sigma_p = 0.1; // pin to a regime where outage is negligible
    m.der = derive_constants(m.cfg);
    const SyncErrorResult sync = sync_error_variance(m, QuadratureSpec{});
    const CampaignStats mc = run_campaign(m, 500, 0xA11CE, 1);
    const double err = std::abs(mc.nch_std - sync.std_dev) / sync.std_dev;
    return bounded("estimator_std_vs_bracket", err, 0.15,
                   "MC std " + fmt(mc.nch_std * 1e12) + " ps vs analytic " +
                       fmt(sync.std_dev * 1e12) + " ps, 500 trials at sigma_p=0.1");
}

CheckResult check_outage(const LinkModel& model) {
    LinkModel m = model;
    m.cfg.sigma_p = 0.6;
    m.der = derive_constants(m.cfg);
    const double ana = outage_probability(m, QuadratureSpec{});
    const CampaignStats mc = run_campaign(m, 500, 0xA11CE, 1);
    const bool pass = ana >= mc.outage_ci_lo && ana <= mc.outage_ci_hi;
    return make("outage_agreement", std::abs(mc.empirical_outage - ana),
                mc.outage_ci_hi - mc.outage_ci_lo, pass,
                "analytic " + fmt(ana) + " vs empirical " + fmt(mc.empirical_outage) +
                    " [" + fmt(mc.outage_ci_lo) + ", " + fmt(mc.outage_ci_hi) +
                    "], 500 trials at sigma_p=0.6");
}

CheckResult check_validity_guard(const LinkModel& model) {
    LinkModel m = model;
    m.cfg.w_z = std::sqrt(m.cfg.A_ar) / 0.6; // ratio 0.6 > 0.5: outside validity
    m.der = derive_constants(m.cfg);
    bool threw = false;
    try {
        (void)p_hap(0, 0, Vec2{0, 0}, m);
    } catch (const model_error&) {
        threw = true;
    }
    return make("validity_guard", threw ? 0 : 1, 0, threw,
                "closed form must refuse sqrt(A_ar)/w_z > 0.5");
}

CheckResult check_threshold_rule(const LinkModel& model) {
    const int nt = n_t_min(model);
    const double e_nbg =
        model.der.lambda_total * model.cfg.mu_bg * std::exp(-model.cfg.mu_bg);
    const int expect = model.cfg.n_t_min
                           ? *model.cfg.n_t_min
                           : std::max(model.cfg.N_s_min,
                                      static_cast<int>(std::ceil(model.cfg.m * e_nbg)));
    return make("threshold_rule", nt, expect, nt == expect && nt >= 1,
                "N_t,min = " + std::to_string(nt) + " (margin term " +
                    fmt(model.cfg.m * e_nbg) + ")");
}

CheckResult check_noiseless(const LinkModel& model) {
    LinkModel m = model;
    m.cfg.sigma_spad = 0;
    m.cfg.mu_bg = 0;
    m.cfg.P_pol = 0;
    m.cfg.sigma_p = std::min(m.cfg.sigma_p, 0.1);
    m.der = derive_constants(m.cfg);
    const auto trials = run_campaign_trials(m, 20, 0xA11CE, 1);
    int ok = 0;
    double worst = 0;
    for (const TrialResult& t : trials) {
        if (t.aligned) ++ok;
        worst = std::max(worst, std::abs(t.n_ch));
    }
    const bool pass = ok == 20 && worst <= 1e-18;
    return make("noiseless_recovery", worst, 1e-18, pass,
                std::to_string(ok) + "/20 shifts recovered; max |n_ch| " + fmt(worst) +
                    " s (double-roundoff scale)");
}

} // namespace

std::vector<CheckResult> run_validation_suite(const LinkModel& model) {
    std::vector<CheckResult> out;
    out.push_back(check_hit_factor(model));
    out.push_back(check_gg_moments(model));
    out.push_back(check_gg_ks(model));
    // The Gaussian approximation of a 64-term fading sum carries an
    // irreducible skewness-driven KS floor near 0.023 for these weights; 0.03
    // covers that floor plus sampling noise at 5e4 draws.
    out.push_back(check_clt(model, "clt_single_cell", model.cfg.alpha, model.cfg.beta,
                            0.03,
                            "KS vs conditional Gaussian at 5e4 draws (skewness floor "
                            "~0.023 is inherent to the approximation)",
                            3));
    // With near-deterministic fading the same machinery should be clean: this
    // isolates the floor above as a property of the fading, not a code defect.
    out.push_back(check_clt(model, "clt_narrow_fading", 400, 400, 0.015,
                            "KS vs conditional Gaussian, fading variance ~0.005", 4));
    out.push_back(check_thinning(model));
    out.push_back(check_background_mean(model));
    out.push_back(check_estimator_std(model));
    out.push_back(check_outage(model));
    out.push_back(check_validity_guard(model));
    out.push_back(check_threshold_rule(model));
    out.push_back(check_noiseless(model));
    return out;
}

} // namespace qslink
