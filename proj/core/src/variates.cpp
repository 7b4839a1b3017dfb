#include "qslink/variates.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

#include "qslink/errors.hpp"

namespace qslink {

namespace {

// GSL's default error handler aborts the process; disable it once and check
// status codes at call sites instead.
const int gsl_handler_disabled = [] {
    gsl_set_error_handler_off();
    return 0;
}();

} // namespace

double gg_pdf(double h, double alpha, double beta) {
    (void)gsl_handler_disabled;
    if (!std::isfinite(h) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw numeric_error("gg_pdf: non-finite argument");
    if (!(h >= 0) || !(alpha > 0) || !(beta > 0))
        throw numeric_error("gg_pdf: requires h >= 0 and alpha, beta > 0");

    const double mn = std::min(alpha, beta);
    if (h == 0.0) {
        // small-h limit: f ~ C h^{min(a,b)-1}
        if (mn > 1.0) return 0.0;
        if (mn < 1.0) return std::numeric_limits<double>::infinity();
        // min = 1: C = Gamma(|a-b|) (ab)^{min} / (Gamma(a) Gamma(b))
        const double nu = std::abs(alpha - beta);
        if (nu == 0.0) return std::numeric_limits<double>::infinity(); // a = b = 1: log divergence
        return std::exp(gsl_sf_lngamma(nu) + mn * std::log(alpha * beta) -
                        gsl_sf_lngamma(alpha) - gsl_sf_lngamma(beta));
    }

    const double nu = alpha - beta; // K is even in its order
    const double z = 2.0 * std::sqrt(alpha * beta * h);
    gsl_sf_result ln_k;
    int status = gsl_sf_bessel_lnKnu_e(std::abs(nu), z, &ln_k);
    if (status != GSL_SUCCESS)
        throw numeric_error("gg_pdf: Bessel K evaluation failed");

    const double log_f = std::log(2.0) + 0.5 * (alpha + beta) * std::log(alpha * beta) -
                         gsl_sf_lngamma(alpha) - gsl_sf_lngamma(beta) +
                         (0.5 * (alpha + beta) - 1.0) * std::log(h) + ln_k.val;
    return std::exp(log_f);
}

double gg_sample(RngStream& rng, double alpha, double beta) {
    return rng.gamma(alpha, 1.0 / alpha) * rng.gamma(beta, 1.0 / beta);
}

std::pair<double, double> sample_r_dev(RngStream& rng, double sigma_p) {
    const double x = rng.normal(1.0);
    const double y = rng.normal(1.0);
    return {sigma_p * x, sigma_p * y};
}

double poisson_pmf(int n, double mu) {
    if (n < 0) throw numeric_error("poisson_pmf: n >= 0 required");
    if (!(mu >= 0)) throw numeric_error("poisson_pmf: mean must be >= 0");
    if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mu) - mu - gsl_sf_lngamma(n + 1.0));
}

double background_arrival(RngStream& rng, double t_qb) {
    return rng.uniform(-0.5 * t_qb, 0.5 * t_qb);
}

} // namespace qslink
