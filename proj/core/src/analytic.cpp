#include "qslink/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <gsl/gsl_sf_gamma.h>

#include "qslink/errors.hpp"
#include "qslink/quadrature.hpp"
#include "qslink/variates.hpp"

namespace qslink {

namespace {

constexpr double inv_sqrt_2pi = 0.3989422804014326779;

double gauss_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return inv_sqrt_2pi / sd * std::exp(-0.5 * z * z);
}

double gauss_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

// A conditional rate node is numerically a point mass when its Gaussian width
// vanishes relative to the mean (deep-miss offsets drive both toward zero;
// naive evaluation there produces NaNs).
bool degenerate(double mean, double sd) { return !(sd > 1e-13 * (1.0 + std::abs(mean))); }

// Radial quadrature nodes carrying the Rayleigh(sigma_p) weight.
struct RadialNodes {
    std::vector<double> r;
    std::vector<double> weight; // integrates ~1 over the truncated range
};

RadialNodes radial_nodes(const LinkModel& model, const QuadratureSpec& quad) {
    quad.validate();
    RadialNodes out;
    const double sp = model.cfg.sigma_p;
    if (sp == 0.0) {
        out.r.push_back(0.0);
        out.weight.push_back(1.0);
        return out;
    }
    GaussLegendre rule(quad.nodes_r);
    const double hi = quad.r_max_sigmas * sp;
    out.r.resize(quad.nodes_r);
    out.weight.resize(quad.nodes_r);
    for (int i = 0; i < quad.nodes_r; ++i) {
        double x, w;
        rule.point(0.0, hi, i, &x, &w);
        out.r[i] = x;
        out.weight[i] = w * (x / (sp * sp)) * std::exp(-0.5 * x * x / (sp * sp));
    }
    return out;
}

struct RateMixture {
    RadialNodes nodes;
    std::vector<GaussianMoments> cond; // conditional rate moments per node
};

RateMixture rate_mixture(const LinkModel& model, const QuadratureSpec& quad) {
    if (!model.der.prop1_valid)
        throw model_error("analytic rate model: sqrt(A_ar)/w_z > 0.5, outside validity region");
    RateMixture mix;
    mix.nodes = radial_nodes(model, quad);
    mix.cond.reserve(mix.nodes.r.size());
    for (double r : mix.nodes.r)
        mix.cond.push_back(mu_ch_total_conditional_moments(r, model));
    return mix;
}

// mass below zero of one conditional Gaussian (the physically truncated part)
double negative_mass(const GaussianMoments& g) {
    if (degenerate(g.mean, g.sd)) return g.mean < 0.0 ? 1.0 : 0.0;
    return gauss_cdf(0.0, g.mean, g.sd);
}

// Adds Poisson(n; mu) * weight for n = 0..n_max into acc.
void add_poisson_row(std::vector<double>& acc, double weight, double mu) {
    const int n_max = static_cast<int>(acc.size()) - 1;
    if (mu <= 0.0) {
        acc[0] += weight;
        return;
    }
    if (mu <= 600.0) {
        double p = std::exp(-mu); // representable: e^-600 ~ 1e-261
        acc[0] += weight * p;
        for (int n = 1; n <= n_max; ++n) {
            p *= mu / n;
            acc[n] += weight * p;
        }
    } else {
        const double lmu = std::log(mu);
        for (int n = 0; n <= n_max; ++n)
            acc[n] += weight * std::exp(n * lmu - mu - gsl_sf_lngamma(n + 1.0));
    }
}

// Poisson mixed over one conditional Gaussian rate, accumulated into acc.
void add_mixture_node(std::vector<double>& acc, double node_weight,
                      const GaussianMoments& g, const QuadratureSpec& quad,
                      const GaussLegendre& mu_rule) {
    if (degenerate(g.mean, g.sd)) {
        add_poisson_row(acc, node_weight, std::max(g.mean, 0.0));
        return;
    }
    acc[0] += node_weight * negative_mass(g); // truncated rate mass detects nothing
    const double lo = std::max(0.0, g.mean - quad.mu_sigmas * g.sd);
    const double hi = g.mean + quad.mu_sigmas * g.sd;
    if (hi <= lo) return;
    for (int k = 0; k < mu_rule.order(); ++k) {
        double mu, w;
        mu_rule.point(lo, hi, k, &mu, &w);
        add_poisson_row(acc, node_weight * w * gauss_pdf(mu, g.mean, g.sd), mu);
    }
}

} // namespace

double DistributionTable::total() const {
    if (kind == Kind::pmf) {
        double s = 0;
        for (double v : mass) s += v;
        return s;
    }
    double s = 0;
    for (size_t i = 1; i < support.size(); ++i)
        s += 0.5 * (mass[i] + mass[i - 1]) * (support[i] - support[i - 1]);
    return s;
}

double DistributionTable::mean() const {
    if (kind == Kind::pmf) {
        double s = 0;
        for (size_t i = 0; i < mass.size(); ++i) s += support[i] * mass[i];
        return s;
    }
    double s = 0;
    for (size_t i = 1; i < support.size(); ++i)
        s += 0.5 * (support[i] * mass[i] + support[i - 1] * mass[i - 1]) *
             (support[i] - support[i - 1]);
    return s;
}

double DistributionTable::variance() const {
    const double m1 = mean();
    double s = 0;
    if (kind == Kind::pmf) {
        for (size_t i = 0; i < mass.size(); ++i)
            s += (support[i] - m1) * (support[i] - m1) * mass[i];
        return s;
    }
    for (size_t i = 1; i < support.size(); ++i) {
        const double a = (support[i] - m1) * (support[i] - m1) * mass[i];
        const double b = (support[i - 1] - m1) * (support[i - 1] - m1) * mass[i - 1];
        s += 0.5 * (a + b) * (support[i] - support[i - 1]);
    }
    return s;
}

void DistributionTable::check_normalized() const {
    for (double v : mass)
        if (!(v >= 0))
            throw numeric_error("DistributionTable: negative or non-finite entry");
    const double t = total();
    if (std::abs(t - 1.0) > 1e-3)
        throw numeric_error("DistributionTable: mass " + std::to_string(t) +
                            " deviates from 1 by more than 1e-3");
}

void QuadratureSpec::validate() const {
    if (nodes_r < 16 || nodes_mu < 16)
        throw numeric_error("QuadratureSpec: node counts must be >= 16");
    if (r_max_sigmas < 4.0 || mu_sigmas < 4.0)
        throw numeric_error("QuadratureSpec: truncation must be >= 4 sigma");
    if (!n_max_auto && n_max < 1)
        throw numeric_error("QuadratureSpec: explicit n_max must be >= 1");
}

GaussianMoments mu_ch_total_conditional_moments(double r, const LinkModel& model) {
    const double k = model.cfg.eta_spad * model.der.lambda_grid * model.der.c0;
    const Vec2 dev{r, 0.0};
    GaussianMoments g;
    g.mean = k * sum_w_total(model, dev);
    g.sd = k * std::sqrt(model.der.c_ab * sum_w2_total(model, dev));
    return g;
}

double mu_ch_total_conditional_pdf(double mu, double r, const LinkModel& model) {
    const GaussianMoments g = mu_ch_total_conditional_moments(r, model);
    if (degenerate(g.mean, g.sd))
        return mu == g.mean ? std::numeric_limits<double>::infinity() : 0.0;
    return gauss_pdf(mu, g.mean, g.sd);
}

double mu_ch_pdf(double mu, const LinkModel& model, const QuadratureSpec& quad) {
    if (mu < 0) return 0.0;
    const RateMixture mix = rate_mixture(model, quad);
    double raw = 0, retained = 0;
    for (size_t i = 0; i < mix.nodes.r.size(); ++i) {
        const GaussianMoments& g = mix.cond[i];
        const double w = mix.nodes.weight[i];
        retained += w * (1.0 - negative_mass(g));
        if (!degenerate(g.mean, g.sd)) raw += w * gauss_pdf(mu, g.mean, g.sd);
    }
    if (!(retained > 0))
        throw numeric_error("mu_ch_pdf: all conditional mass below zero");
    return raw / retained; // truncated at zero and renormalized
}

DistributionTable p_nsig_table(const LinkModel& model, const QuadratureSpec& quad) {
    const RateMixture mix = rate_mixture(model, quad);

    // moment-based support guess, then verify the tail is really < 1e-6
    double m1 = 0, m2 = 0;
    for (size_t i = 0; i < mix.nodes.r.size(); ++i) {
        const double w = mix.nodes.weight[i];
        const double mean = std::max(mix.cond[i].mean, 0.0);
        m1 += w * mean;
        m2 += w * (mix.cond[i].sd * mix.cond[i].sd + mean * mean);
    }
    const double var = std::max(m2 - m1 * m1 + m1, 1.0);
    int n_max = quad.n_max_auto
                    ? static_cast<int>(std::ceil(m1 + 12.0 * std::sqrt(var))) + 30
                    : quad.n_max;

    GaussLegendre mu_rule(quad.nodes_mu);
    for (int attempt = 0;; ++attempt) {
        std::vector<double> acc(static_cast<size_t>(n_max) + 1, 0.0);
        for (size_t i = 0; i < mix.nodes.r.size(); ++i)
            add_mixture_node(acc, mix.nodes.weight[i], mix.cond[i], quad, mu_rule);

        double total = 0;
        for (double v : acc) total += v;
        // radial truncation loses ~e^{-r_max^2/2}; only the count tail may exceed it
        const double radial_loss = std::exp(-0.5 * quad.r_max_sigmas * quad.r_max_sigmas);
        if (!quad.n_max_auto || total >= 1.0 - 1e-6 - radial_loss) {
            DistributionTable t;
            t.kind = DistributionTable::Kind::pmf;
            t.support.resize(acc.size());
            for (size_t n = 0; n < acc.size(); ++n) t.support[n] = static_cast<double>(n);
            t.mass = std::move(acc);
            t.check_normalized();
            return t;
        }
        if (attempt >= 6)
            throw numeric_error("p_nsig_table: support did not capture 1 - 1e-6 of the mass");
        n_max += n_max / 2 + 50;
    }
}

double p_nsig(int n, const LinkModel& model, const QuadratureSpec& quad) {
    if (n < 0) throw numeric_error("p_nsig: n >= 0 required");
    const RateMixture mix = rate_mixture(model, quad);
    GaussLegendre mu_rule(quad.nodes_mu);
    double acc = 0;
    for (size_t i = 0; i < mix.nodes.r.size(); ++i) {
        const GaussianMoments& g = mix.cond[i];
        const double nw = mix.nodes.weight[i];
        if (degenerate(g.mean, g.sd)) {
            acc += nw * poisson_pmf(n, std::max(g.mean, 0.0));
            continue;
        }
        if (n == 0) acc += nw * negative_mass(g);
        const double lo = std::max(0.0, g.mean - quad.mu_sigmas * g.sd);
        const double hi = g.mean + quad.mu_sigmas * g.sd;
        if (hi <= lo) continue;
        for (int k = 0; k < mu_rule.order(); ++k) {
            double mu, w;
            mu_rule.point(lo, hi, k, &mu, &w);
            acc += nw * w * gauss_pdf(mu, g.mean, g.sd) * poisson_pmf(n, mu);
        }
    }
    return acc;
}

double p_nbg(int n, const LinkModel& model) {
    const double mean = model.der.lambda_total * model.cfg.mu_bg * std::exp(-model.cfg.mu_bg);
    return poisson_pmf(n, mean);
}

DistributionTable p_nbg_table(const LinkModel& model) {
    const double mean = model.der.lambda_total * model.cfg.mu_bg * std::exp(-model.cfg.mu_bg);
    int n_max = 0;
    if (mean > 0) {
        n_max = static_cast<int>(std::ceil(mean + 12.0 * std::sqrt(mean) + 20.0));
        // extend until the tail really is below 1e-9
        while (poisson_pmf(n_max, mean) > 1e-12) n_max += 10;
    }
    DistributionTable t;
    t.kind = DistributionTable::Kind::pmf;
    t.support.resize(static_cast<size_t>(n_max) + 1);
    t.mass.resize(t.support.size());
    for (int n = 0; n <= n_max; ++n) {
        t.support[n] = n;
        t.mass[n] = poisson_pmf(n, mean);
    }
    return t;
}

int n_t_min(const LinkModel& model) {
    if (model.cfg.n_t_min) return *model.cfg.n_t_min;
    const double e_nbg = model.der.lambda_total * model.cfg.mu_bg * std::exp(-model.cfg.mu_bg);
    const double margin = model.cfg.m * e_nbg;
    return std::max(model.cfg.N_s_min, static_cast<int>(std::ceil(margin)));
}

SyncErrorResult sync_error_from_tables(const DistributionTable& p_sig,
                                       const DistributionTable& p_bg, int threshold,
                                       double sigma_spad, double t_qb) {
    // a zero-detection acquisition can never produce an estimate
    const int nt = std::max(threshold, 1);
    const double s2 = sigma_spad * sigma_spad;
    const double u2 = t_qb * t_qb / 12.0;
    double acc = 0, mass = 0;
    for (size_t a = 0; a < p_sig.mass.size(); ++a) {
        const double ns = p_sig.support[a];
        const double pa = p_sig.mass[a];
        if (pa == 0) continue;
        for (size_t b = 0; b < p_bg.mass.size(); ++b) {
            const double nb = p_bg.support[b];
            const double pb = p_bg.mass[b];
            if (pb == 0) continue;
            const double tot = ns + nb;
            if (tot < nt) continue;
            const double bracket = (2.0 * ns * s2 + nb * (u2 + s2)) / (tot * tot);
            acc += pa * pb * bracket;
            mass += pa * pb;
        }
    }
    SyncErrorResult r;
    r.retained_mass = mass;
    r.low_confidence = mass < 0.5;
    r.variance = mass > 0 ? acc / mass : std::numeric_limits<double>::quiet_NaN();
    r.std_dev = std::sqrt(r.variance);
    return r;
}

SyncErrorResult sync_error_variance(const LinkModel& model, const QuadratureSpec& quad) {
    const DistributionTable ps = p_nsig_table(model, quad);
    const DistributionTable pb = p_nbg_table(model);
    return sync_error_from_tables(ps, pb, n_t_min(model), model.cfg.sigma_spad,
                                  model.cfg.t_qb);
}

double outage_from_tables(const DistributionTable& p_sig, const DistributionTable& p_bg,
                          int threshold) {
    double below = 0;
    for (size_t a = 0; a < p_sig.mass.size(); ++a) {
        const double ns = p_sig.support[a];
        if (ns >= threshold) continue;
        for (size_t b = 0; b < p_bg.mass.size(); ++b) {
            if (ns + p_bg.support[b] < threshold) below += p_sig.mass[a] * p_bg.mass[b];
        }
    }
    return std::min(below, 1.0);
}

double outage_probability(const LinkModel& model, const QuadratureSpec& quad) {
    const DistributionTable ps = p_nsig_table(model, quad);
    const DistributionTable pb = p_nbg_table(model);
    return outage_from_tables(ps, pb, n_t_min(model));
}

double expected_nsig(const LinkModel& model, const QuadratureSpec& quad) {
    return p_nsig_table(model, quad).mean();
}

} // namespace qslink
