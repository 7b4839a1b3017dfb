#pragma once

#include <utility>

#include "qslink/rng.hpp"

namespace qslink {

// Gamma-Gamma irradiance density
//   f(h) = 2 (ab)^{(a+b)/2} / (Gamma(a) Gamma(b)) h^{(a+b)/2 - 1} K_{a-b}(2 sqrt(ab h))
// Unit mean, variance 1/a + 1/b + 1/(ab). Evaluated in log space with the
// real-order Bessel K so it stays accurate over h in [1e-6, 50] and beyond.
// h = 0 returns the limit: 0 when min(a,b) > 1, the finite constant when
// min(a,b) = 1, +inf when min(a,b) < 1.
double gg_pdf(double h, double alpha, double beta);

// Exact sampler: product of two unit-mean Gamma variates,
// Gamma(a, 1/a) * Gamma(b, 1/b). Never inverse-CDF of the Bessel form.
double gg_sample(RngStream& rng, double alpha, double beta);

// Pointing offset: two independent N(0, sigma_p^2) axes. sigma_p = 0 gives (0,0)
// while still consuming two draws (fixed stream layout).
std::pair<double, double> sample_r_dev(RngStream& rng, double sigma_p);

// Poisson mass mu^n e^{-mu} / n!; log-space, exact at mu = 0.
double poisson_pmf(int n, double mu);

// Sampling contract lives on RngStream::poisson / PoissonSampler.
inline int poisson_sample(RngStream& rng, double mu) { return rng.poisson(mu); }

// Background photon arrival within a slot: uniform on [-t_qb/2, +t_qb/2].
double background_arrival(RngStream& rng, double t_qb);

} // namespace qslink
