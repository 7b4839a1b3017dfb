#pragma once

#include <cstdint>
#include <random>

namespace qslink {

// One deterministic random stream. (master_seed, stream_id) fully determines
// the sequence; distinct stream_ids give statistically independent streams.
// State is derived by a splitmix64 chain over the two ids, so sequences are
// reproducible within this implementation (documented contract: alternates
// only match statistically, not bitwise).
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // The one-word draws live in the header so slot loops can inline them.
    std::uint64_t raw() { return eng_(); }
    double uniform() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }

    double normal(double sigma);    // mean 0; 128-strip ziggurat rejection
    double gamma(double shape, double scale);

    // Inverse-CDF walk: exactly one uniform per draw. Exact for any mu >= 0
    // (large mu split recursively: sum of two Poissons is Poisson).
    int poisson(double mu);

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 eng_;
};

// Hot-loop Poisson sampler with the per-mean constant precomputed. Given the
// same uniforms it reproduces RngStream::poisson(mu) draw for draw.
class PoissonSampler {
public:
    explicit PoissonSampler(double mu);
    int operator()(RngStream& rng) const;
    double mean() const { return mu_; }

private:
    double mu_;
    double exp_neg_mu_; // e^{-mu}, valid because construction splits mu > 500
    bool split_;        // mu too large for a single walk; defer to RngStream
};

// Hot-loop Gamma sampler with the per-shape rejection constants precomputed
// (Marsaglia-Tsang squeeze; shape < 1 boosted through shape + 1). Exact.
// RngStream::gamma(shape, scale) reproduces it draw for draw.
class GammaSampler {
public:
    GammaSampler(double shape, double scale);
    double operator()(RngStream& rng) const;

private:
    double shape_, scale_;
    double d_, c_;  // rejection constants for max(shape, shape + 1)
    bool boost_;    // shape < 1: multiply by U^{1/shape}
};

} // namespace qslink
