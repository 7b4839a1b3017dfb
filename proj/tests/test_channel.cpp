#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qslink/channel.hpp"
#include "qslink/errors.hpp"
#include "qslink/rng.hpp"
#include "qslink/variates.hpp"

using namespace qslink;

namespace {

LinkModel defaults() { return LinkModel::build(SystemConfig{}); }

ChannelRealization ones_fading(const LinkModel& m, Vec2 r_dev = {}) {
    ChannelRealization real;
    real.r_dev = r_dev;
    real.n_ar = m.der.N_ar;
    real.n_gr = m.der.N_gr;
    real.fading.assign(static_cast<size_t>(real.n_ar) * real.n_gr, 1.0);
    return real;
}

} // namespace

TEST_CASE("closed-form hit probability matches aperture quadrature") {
    const LinkModel m = defaults();
    const Vec2 dev{0.02, -0.01};
    for (int i : {0, 9, 63}) {
        for (int j : {0, 44, 99}) {
            const double closed = p_hap(i, j, dev, m);
            const Vec2 center{m.grid.offsets[j].x + dev.x, m.grid.offsets[j].y + dev.y};
            const double oracle =
                p_hit_oracle(m.array.positions[i], center, m.cfg.A_ar, m.cfg.w_z, 24);
            CHECK(closed == doctest::Approx(oracle * m.der.P_ap).epsilon(2e-3));
        }
    }
}

TEST_CASE("aperture quadrature is converged by moderate orders") {
    const LinkModel m = defaults();
    const Vec2 p = m.array.positions[27];
    const Vec2 c{0.01, 0.03};
    const double lo = p_hit_oracle(p, c, m.cfg.A_ar, m.cfg.w_z, 20);
    const double hi = p_hit_oracle(p, c, m.cfg.A_ar, m.cfg.w_z, 40);
    CHECK(lo == doctest::Approx(hi).epsilon(1e-10));
}

TEST_CASE("spatial weight is the Gaussian beam intensity profile") {
    const double w_z = 0.5;
    CHECK(spatial_weight({0, 0}, {0, 0}, {0, 0}, w_z) == 1.0);
    const Vec2 ar{0.14, -0.1};
    const Vec2 go{0.02, 0.06};
    const Vec2 dev{-0.03, 0.01};
    const double dx = ar.x - go.x - dev.x;
    const double dy = ar.y - go.y - dev.y;
    const double want = std::exp(-2.0 * (dx * dx + dy * dy) / (w_z * w_z));
    CHECK(spatial_weight(ar, go, dev, w_z) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("per-slot reception with unit fading reduces to c0 * sum of weights") {
    const LinkModel m = defaults();
    const Vec2 dev{0.015, -0.04};
    const ChannelRealization real = ones_fading(m, dev);
    for (int j : {0, 17, 44, 99}) {
        double sum_w = 0;
        for (int i = 0; i < m.der.N_ar; ++i)
            sum_w += spatial_weight(m.array.positions[i], m.grid.offsets[j], dev, m.cfg.w_z);
        CHECK(p_rec_slot(j, real, m) == doctest::Approx(m.der.c0 * sum_w).epsilon(1e-12));
        CHECK(mu_ch_slot(j, real, m) ==
              doctest::Approx(m.cfg.eta_spad * p_rec_slot(j, real, m)).epsilon(1e-14));
        CHECK(sum_w_cell(m, j, dev) == doctest::Approx(sum_w).epsilon(1e-12));
    }
}

TEST_CASE("weight tables factor the 2-D weight exactly and sum consistently") {
    const LinkModel m = defaults();
    const Vec2 dev{-0.02, 0.05};
    const WeightTables t = WeightTables::build(m, dev);
    for (int iy : {0, 3, 7}) {
        for (int ix : {0, 4, 7}) {
            const int i = iy * m.array.nx + ix;
            for (int jy : {0, 5, 9}) {
                for (int jx : {0, 2, 9}) {
                    const int j = jy * m.grid.nx + jx;
                    const double direct = spatial_weight(m.array.positions[i],
                                                         m.grid.offsets[j], dev, m.cfg.w_z);
                    CHECK(t.w(ix, iy, jx, jy) == doctest::Approx(direct).epsilon(1e-13));
                }
            }
        }
    }

    double total = 0, total2 = 0;
    for (int j = 0; j < m.der.N_gr; ++j) {
        total += sum_w_cell(m, j, dev);
        total2 += sum_w2_cell(m, j, dev);
    }
    CHECK(sum_w_total(m, dev) == doctest::Approx(total).epsilon(1e-12));
    CHECK(sum_w2_total(m, dev) == doctest::Approx(total2).epsilon(1e-12));
}

TEST_CASE("channel realization: shape, positivity, offset statistics") {
    const LinkModel m = defaults();
    RngStream rng(0xC0FFEE, 0);
    double sx2 = 0, sum_h = 0;
    bool all_positive = true;
    const int n_draws = 400;
    for (int k = 0; k < n_draws; ++k) {
        const ChannelRealization real = sample_channel(m, rng);
        REQUIRE(real.n_ar == 64);
        REQUIRE(real.n_gr == 100);
        REQUIRE(real.fading.size() == 6400);
        for (double h : real.fading) all_positive = all_positive && (h > 0.0);
        sx2 += real.r_dev.x * real.r_dev.x;
        sum_h += real.h(5, 7);
    }
    CHECK(all_positive);
    // r_dev.x ~ N(0, sigma_p^2), sigma_p = 0.3; fading has unit mean
    CHECK(sx2 / n_draws == doctest::Approx(0.09).epsilon(0.25));
    CHECK(sum_h / n_draws == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("static-across-grid fading repeats one draw over all cells") {
    SystemConfig cfg;
    cfg.fading_static_across_grid = true;
    const LinkModel m = LinkModel::build(cfg);
    RngStream rng(7, 0);
    const ChannelRealization real = sample_channel(m, rng);
    for (int i = 0; i < m.der.N_ar; ++i)
        for (int j = 1; j < m.der.N_gr; ++j)
            CHECK(real.h(i, j) == real.h(i, 0));

    // default mode: distinct cells get fresh fading
    const LinkModel m2 = defaults();
    RngStream rng2(7, 0);
    const ChannelRealization real2 = sample_channel(m2, rng2);
    CHECK(real2.h(0, 0) != real2.h(0, 1));
}

TEST_CASE("conditional reception moments agree with a direct fading average") {
    const LinkModel m = defaults();
    const Vec2 dev{0.03, 0.02};
    const int j = central_cell(m);
    const GaussianMoments gm = p_rec_conditional_moments(j, dev, m);

    CHECK(gm.mean == doctest::Approx(m.der.c0 * sum_w_cell(m, j, dev)).epsilon(1e-12));
    const double want_var = m.der.c0 * m.der.c0 * m.der.c_ab * sum_w2_cell(m, j, dev);
    CHECK(gm.sd * gm.sd == doctest::Approx(want_var).epsilon(1e-12));

    RngStream rng(0xDDD, 1);
    double mean = 0, var = 0;
    const int n = 20000;
    std::vector<double> samples(n);
    ChannelRealization real;
    real.r_dev = dev;
    real.n_ar = m.der.N_ar;
    real.n_gr = m.der.N_gr;
    real.fading.assign(6400, 1.0);
    for (double& p : samples) {
        // p_rec_slot(j, ...) only reads fading column j; refresh just that
        for (int i = 0; i < m.der.N_ar; ++i)
            real.fading[static_cast<size_t>(i) * m.der.N_gr + j] =
                gg_sample(rng, m.cfg.alpha, m.cfg.beta);
        p = p_rec_slot(j, real, m);
        mean += p;
    }
    mean /= n;
    for (double p : samples) var += (p - mean) * (p - mean);
    var /= n - 1;
    CHECK(mean == doctest::Approx(gm.mean).epsilon(0.01));
    CHECK(std::sqrt(var) == doctest::Approx(gm.sd).epsilon(0.05));

    // density integrates features of the same Gaussian
    const double at_mean = p_rec_conditional_pdf(gm.mean, j, dev, m);
    CHECK(at_mean == doctest::Approx(1.0 / (gm.sd * std::sqrt(2 * std::numbers::pi)))
                         .epsilon(1e-12));
}

TEST_CASE("reception probability reaching 1 is a model error, not a clamp") {
    const LinkModel m = defaults();
    ChannelRealization real = ones_fading(m);
    for (double& h : real.fading) h = 1e6;
    CHECK_THROWS_AS(p_rec_slot(central_cell(m), real, m), model_error);
}

TEST_CASE("closed-form hit factor refuses configs outside its validity region") {
    SystemConfig cfg;
    cfg.w_z = std::sqrt(cfg.A_ar) / 0.6;
    const LinkModel m = LinkModel::build(cfg);
    CHECK_THROWS_AS(p_hap(0, 0, Vec2{}, m), model_error);
}

TEST_CASE("central cell of the default 10x10 grid") {
    const LinkModel m = defaults();
    CHECK(central_cell(m) == 44);
    const Vec2 c = m.grid.offsets[44];
    CHECK(std::abs(c.x) <= 0.02 + 1e-15);
    CHECK(std::abs(c.y) <= 0.02 + 1e-15);
}
