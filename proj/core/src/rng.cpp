#include "qslink/rng.hpp"

#include <cmath>

#include "qslink/errors.hpp"

namespace qslink {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t stream_id) {
    // chain the two ids through splitmix64 and expand into a seed sequence
    std::uint64_t base = splitmix64(splitmix64(master_seed) ^ (stream_id + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{splitmix64(base), splitmix64(base + 1), splitmix64(base + 2),
                      splitmix64(base + 3)};
    return std::mt19937_64(seq);
}

// Equal-area rejection tables for the standard normal (Marsaglia-Tsang
// ziggurat, 128 strips). Strip 0 is the base rectangle [0, R] plus the
// analytic tail beyond R; strips 1..127 stack above it. x_[i] decreases from
// the pseudo-width x_[0] = V / phi(R) down to x_[128] = 0, f_[i] = phi(x_[i]).
struct ZigguratTables {
    static constexpr int strips = 128;
    static constexpr double r = 3.442619855899; // rightmost finite strip edge
    double x_[strips + 1];
    double f_[strips + 1];
    ZigguratTables() {
        constexpr double v = 9.91256303526217e-3; // area of each strip
        const double f_r = std::exp(-0.5 * r * r);
        x_[0] = v / f_r;
        x_[1] = r;
        for (int i = 2; i <= strips - 1; ++i) {
            const double prev = x_[i - 1];
            x_[i] = std::sqrt(-2.0 * std::log(v / prev + std::exp(-0.5 * prev * prev)));
        }
        x_[strips] = 0.0;
        for (int i = 0; i <= strips; ++i) f_[i] = std::exp(-0.5 * x_[i] * x_[i]);
    }
};

const ZigguratTables zig;

// Inverse-CDF walk shared by RngStream::poisson and PoissonSampler.
int poisson_walk(double u, double mu, double exp_neg_mu) {
    double p = exp_neg_mu;
    double c = p;
    int n = 0;
    // expected iterations ~ mu + 1; cap guards against u == 1 rounding
    const int cap = static_cast<int>(mu + 40.0 * std::sqrt(mu + 1.0) + 40.0);
    while (u > c && n < cap) {
        ++n;
        p *= mu / n;
        c += p;
    }
    return n;
}

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id),
      eng_(make_engine(master_seed, stream_id)) {}

double RngStream::normal(double sigma) {
    for (;;) {
        // one engine word feeds strip (bits 0-6), sign (bit 7), magnitude (bits 11-63)
        const std::uint64_t w = eng_();
        const int i = static_cast<int>(w & 127u);
        const double sign = (w & 128u) ? -1.0 : 1.0;
        const double u = static_cast<double>(w >> 11) * 0x1.0p-53;
        const double x = u * zig.x_[i];
        if (x < zig.x_[i + 1]) return sigma * sign * x; // inside the strip's core
        if (i == 0) {
            // base strip overflow: sample the tail beyond R exactly
            double t, y;
            do {
                double u1;
                do {
                    u1 = uniform();
                } while (u1 == 0.0);
                t = -std::log(u1) / ZigguratTables::r;
                y = -std::log(1.0 - uniform());
            } while (y + y < t * t);
            return sigma * sign * (ZigguratTables::r + t);
        }
        // wedge between the strip's core and the density curve
        if (zig.f_[i] + uniform() * (zig.f_[i + 1] - zig.f_[i]) < std::exp(-0.5 * x * x))
            return sigma * sign * x;
    }
}

double RngStream::gamma(double shape, double scale) {
    return GammaSampler(shape, scale)(*this);
}

int RngStream::poisson(double mu) {
    if (!(mu >= 0)) throw numeric_error("poisson: mean must be >= 0");
    if (mu == 0) return 0;
    if (mu > 500.0) return poisson(0.5 * mu) + poisson(mu - 0.5 * mu); // exact split
    return poisson_walk(uniform(), mu, std::exp(-mu));
}

PoissonSampler::PoissonSampler(double mu) : mu_(mu) {
    if (!(mu >= 0)) throw numeric_error("poisson: mean must be >= 0");
    split_ = mu > 500.0;
    exp_neg_mu_ = split_ ? 0.0 : std::exp(-mu);
}

int PoissonSampler::operator()(RngStream& rng) const {
    if (split_) return rng.poisson(mu_);
    if (mu_ == 0) return 0;
    return poisson_walk(rng.uniform(), mu_, exp_neg_mu_);
}

GammaSampler::GammaSampler(double shape, double scale) : shape_(shape), scale_(scale) {
    if (!(shape > 0) || !(scale > 0))
        throw numeric_error("gamma: shape and scale must be > 0");
    boost_ = shape < 1.0;
    const double k = boost_ ? shape + 1.0 : shape;
    d_ = k - 1.0 / 3.0;
    c_ = 1.0 / std::sqrt(9.0 * d_);
}

double GammaSampler::operator()(RngStream& rng) const {
    for (;;) {
        double x, v;
        do {
            x = rng.normal(1.0);
            v = 1.0 + c_ * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 ||
            std::log(u) < 0.5 * x2 + d_ * (1.0 - v + std::log(v))) {
            double g = d_ * v * scale_;
            if (boost_) g *= std::pow(rng.uniform(), 1.0 / shape_);
            return g;
        }
    }
}

} // namespace qslink
