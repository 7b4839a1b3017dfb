#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace qslink {

// One-sample Kolmogorov-Smirnov distance sup |F_n - F|. Sorts a copy.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// Pearson chi-square p-value for observed counts vs expected counts
// (expected must be > 0; degrees of freedom = bins - 1 - df_reduction).
double chi_square_pvalue(const std::vector<double>& observed,
                         const std::vector<double>& expected,
                         int df_reduction = 0);

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n);

// 95% CI for a sample mean (normal approximation).
std::pair<double, double> mean_interval(double mean, double sd, std::int64_t n);

// 95% CI for a sample standard deviation (chi-square pivot).
std::pair<double, double> std_interval(double sd, std::int64_t n);

// Smallest k with P(Binomial(n, p) <= k) >= q. Log-space pmf walk.
std::int64_t binomial_quantile(double q, std::int64_t n, double p);

// Total-variation distance between two pmfs over 0..max(len)-1.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

} // namespace qslink
