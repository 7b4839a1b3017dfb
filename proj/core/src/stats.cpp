#include "qslink/stats.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_cdf.h>

#include "qslink/errors.hpp"

namespace qslink {

namespace {
constexpr double z95 = 1.959963984540054; // two-sided 95% normal quantile
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw numeric_error("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double chi_square_pvalue(const std::vector<double>& observed,
                         const std::vector<double>& expected, int df_reduction) {
    if (observed.size() != expected.size() || observed.empty())
        throw numeric_error("chi_square_pvalue: bin mismatch");
    double stat = 0;
    int df = -1 - df_reduction;
    for (size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0) {
            if (observed[i] > 0)
                throw numeric_error("chi_square_pvalue: observed mass in zero-expectation bin");
            continue;
        }
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
        ++df;
    }
    if (df < 1) throw numeric_error("chi_square_pvalue: not enough usable bins");
    return gsl_cdf_chisq_Q(stat, df);
}

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n) {
    if (n <= 0) throw numeric_error("wilson_interval: n must be positive");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z95 * z95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2 * nn)) / denom;
    const double half = z95 / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::pair<double, double> mean_interval(double mean, double sd, std::int64_t n) {
    if (n <= 0) throw numeric_error("mean_interval: n must be positive");
    const double half = z95 * sd / std::sqrt(static_cast<double>(n));
    return {mean - half, mean + half};
}

std::pair<double, double> std_interval(double sd, std::int64_t n) {
    if (n <= 1) throw numeric_error("std_interval: need n > 1");
    const double df = static_cast<double>(n - 1);
    const double lo = sd * std::sqrt(df / gsl_cdf_chisq_Pinv(0.975, df));
    const double hi = sd * std::sqrt(df / gsl_cdf_chisq_Pinv(0.025, df));
    return {lo, hi};
}

std::int64_t binomial_quantile(double q, std::int64_t n, double p) {
    if (n <= 0 || p < 0 || p > 1 || q < 0 || q > 1)
        throw numeric_error("binomial_quantile: bad arguments");
    if (p == 0) return 0;
    if (p == 1) return n;
    // log-space pmf walk keeps the cumulative exact to double precision
    double lp = static_cast<double>(n) * std::log1p(-p);
    const double lr = std::log(p) - std::log1p(-p);
    double cum = std::exp(lp);
    std::int64_t k = 0;
    while (cum < q - 1e-12 && k < n) {
        ++k;
        lp += lr + std::log((static_cast<double>(n) - k + 1.0) / static_cast<double>(k));
        cum += std::exp(lp);
    }
    return k;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    const size_t n = std::max(p.size(), q.size());
    double d = 0;
    for (size_t i = 0; i < n; ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        d += std::abs(a - b);
    }
    return 0.5 * d;
}

} // namespace qslink
