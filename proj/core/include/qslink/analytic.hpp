#pragma once

#include <vector>

#include "qslink/channel.hpp"

namespace qslink {

// A discrete pmf over counts or a gridded pdf over a real support.
struct DistributionTable {
    enum class Kind { pmf, pdf };
    Kind kind = Kind::pmf;
    std::vector<double> support;
    std::vector<double> mass; // pmf mass or pdf density, all >= 0

    double total() const;     // sum (pmf) or trapezoid integral (pdf)
    double mean() const;
    double variance() const;
    // Throws numeric_error unless total() is within 1e-3 of 1 and entries >= 0.
    void check_normalized() const;
};

// Quadrature ranges/node counts the closed forms leave open.
struct QuadratureSpec {
    double r_max_sigmas = 6.0; // Rayleigh truncation, multiples of sigma_p
    double mu_sigmas = 8.0;    // Gaussian truncation for the rate mixture
    int nodes_r = 200;
    int nodes_mu = 128;
    bool n_max_auto = true;
    int n_max = 0;             // used when n_max_auto is false

    void validate() const;     // nodes >= 16, truncations >= 4 sigma
};

// Gaussian density of the acquisition-aggregate rate mu'_ch conditioned on a
// radial offset r (beam offset (r, 0)): mean eta lambda_grid c0 sum w,
// variance eta^2 lambda_grid^2 c0^2 c_ab sum w^2.
double mu_ch_total_conditional_pdf(double mu, double r, const LinkModel& model);
GaussianMoments mu_ch_total_conditional_moments(double r, const LinkModel& model);

// Rayleigh-marginalized pdf of mu'_ch (worst-case 1D offset reduction),
// truncated to mu >= 0 and renormalized. sigma_p = 0 degenerates to the
// conditional pdf at r = 0.
double mu_ch_pdf(double mu, const LinkModel& model, const QuadratureSpec& quad);

// P(N_sig = n): Poisson mixed over the mu'_ch law by nested quadrature.
// Negative-rate mass of the Gaussian contributes at mu = 0 (no detections).
double p_nsig(int n, const LinkModel& model, const QuadratureSpec& quad);

// Full pmf with the support auto-truncated where the tail mass < 1e-6.
DistributionTable p_nsig_table(const LinkModel& model, const QuadratureSpec& quad);

// Background count: Poisson with mean lambda_total mu_bg e^{-mu_bg}.
double p_nbg(int n, const LinkModel& model);
DistributionTable p_nbg_table(const LinkModel& model);

// Detection threshold: max(N_s_min, ceil(m * E[N_bg])), explicit override wins.
int n_t_min(const LinkModel& model);

struct SyncErrorResult {
    double variance = 0;      // s^2
    double std_dev = 0;       // s
    double retained_mass = 0; // P(N_tot >= threshold)
    bool low_confidence = false; // retained mass < 0.5
};

// Expected estimator variance conditioned on a non-outage acquisition:
// E[ (2 N_sig sigma^2 + N_bg (t_qb^2/12 + sigma^2)) / N_tot^2 | N_tot >= N_t,min ].
SyncErrorResult sync_error_variance(const LinkModel& model, const QuadratureSpec& quad);

// Same double sum over caller-supplied count distributions (degenerate-pmf oracles).
SyncErrorResult sync_error_from_tables(const DistributionTable& p_sig,
                                       const DistributionTable& p_bg,
                                       int threshold, double sigma_spad, double t_qb);

// P(N_sig + N_bg < N_t,min), strict inequality.
double outage_probability(const LinkModel& model, const QuadratureSpec& quad);
double outage_from_tables(const DistributionTable& p_sig,
                          const DistributionTable& p_bg, int threshold);

// E[N_sig] under the analytic law (reported in sweep rows).
double expected_nsig(const LinkModel& model, const QuadratureSpec& quad);

} // namespace qslink
