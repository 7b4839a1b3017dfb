#include "qslink/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qslink/errors.hpp"
#include "qslink/quadrature.hpp"
#include "qslink/variates.hpp"

namespace qslink {

namespace {

void ensure_validity(const LinkModel& model, const char* op) {
    if (!model.der.prop1_valid)
        throw model_error(std::string(op) +
                          ": sqrt(A_ar)/w_z > 0.5, outside the closed-form validity region");
}

} // namespace

LinkModel LinkModel::build(const SystemConfig& cfg) {
    LinkModel m;
    m.cfg = cfg;
    m.der = derive_constants(cfg);
    m.array = ccr_positions(cfg);
    m.grid = grid_offsets(cfg);
    return m;
}

ChannelRealization sample_channel(const LinkModel& model, RngStream& rng) {
    ChannelRealization real;
    real.n_ar = model.der.N_ar;
    real.n_gr = model.der.N_gr;
    auto [dx, dy] = sample_r_dev(rng, model.cfg.sigma_p);
    real.r_dev = {dx, dy};
    real.fading.resize(static_cast<size_t>(real.n_ar) * real.n_gr);
    const double a = model.cfg.alpha, b = model.cfg.beta;
    // rejection constants hoisted out of the (N_ar x N_gr)-draw loop
    const GammaSampler ga(a, 1.0 / a), gb(b, 1.0 / b);
    if (model.cfg.fading_static_across_grid) {
        // one draw per CCR, repeated across every grid cell
        for (int i = 0; i < real.n_ar; ++i) {
            const double h = ga(rng) * gb(rng);
            for (int j = 0; j < real.n_gr; ++j)
                real.fading[static_cast<size_t>(i) * real.n_gr + j] = h;
        }
    } else {
        // fresh per grid cell (cell-major draw order)
        for (int j = 0; j < real.n_gr; ++j)
            for (int i = 0; i < real.n_ar; ++i)
                real.fading[static_cast<size_t>(i) * real.n_gr + j] = ga(rng) * gb(rng);
    }
    return real;
}

double spatial_weight(Vec2 p_ar, Vec2 grid_offset, Vec2 r_dev, double w_z) {
    const double dx = p_ar.x - grid_offset.x - r_dev.x;
    const double dy = p_ar.y - grid_offset.y - r_dev.y;
    return std::exp(-2.0 * (dx * dx + dy * dy) / (w_z * w_z));
}

double p_hap(int i, int j, Vec2 r_dev, const LinkModel& model) {
    ensure_validity(model, "p_hap");
    const double w = spatial_weight(model.array.positions[i], model.grid.offsets[j],
                                    r_dev, model.cfg.w_z);
    const double v = (2.0 * model.cfg.A_ar / (std::numbers::pi * model.cfg.w_z * model.cfg.w_z)) *
                     w * model.der.P_ap;
    if (v >= 1.0)
        throw model_error("p_hap >= 1: beam waist too small relative to A_ar");
    return v;
}

double p_hit_oracle(Vec2 ccr_pos, Vec2 beam_center, double A_ar, double w_z,
                    int quad_order) {
    if (quad_order < 2) throw numeric_error("p_hit_oracle: quad_order >= 2 required");
    const double side = std::sqrt(A_ar);

    auto integrate = [&](int order) {
        GaussLegendre rule(order);
        // beam intensity (2/(pi w^2)) exp(-2 r^2 / w^2) over the square aperture;
        // separable, so two 1D integrals
        double ix = rule.integrate(
            [&](double u) {
                const double d = u - beam_center.x;
                return std::exp(-2.0 * d * d / (w_z * w_z));
            },
            ccr_pos.x - 0.5 * side, ccr_pos.x + 0.5 * side);
        double iy = rule.integrate(
            [&](double u) {
                const double d = u - beam_center.y;
                return std::exp(-2.0 * d * d / (w_z * w_z));
            },
            ccr_pos.y - 0.5 * side, ccr_pos.y + 0.5 * side);
        return (2.0 / (std::numbers::pi * w_z * w_z)) * ix * iy;
    };

    const double coarse = integrate(quad_order);
    const double fine = integrate(2 * quad_order);
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) / scale > 1e-6)
        throw numeric_error("p_hit_oracle: quadrature did not converge at the given order");
    return fine;
}

double p_rec_slot(int j, const ChannelRealization& real, const LinkModel& model) {
    ensure_validity(model, "p_rec_slot");
    if (real.n_ar != model.der.N_ar || real.n_gr != model.der.N_gr)
        throw config_error("p_rec_slot: realization dimensions do not match config");
    double s = 0;
    for (int i = 0; i < real.n_ar; ++i) {
        s += real.h(i, j) * spatial_weight(model.array.positions[i], model.grid.offsets[j],
                                           real.r_dev, model.cfg.w_z);
    }
    const double p = model.der.c0 * s;
    if (p >= 1.0)
        throw model_error("p_rec_slot >= 1: invalid scenario (not clamped)");
    return p;
}

double mu_ch_slot(int j, const ChannelRealization& real, const LinkModel& model) {
    return model.cfg.eta_spad * p_rec_slot(j, real, model);
}

GaussianMoments p_rec_conditional_moments(int j, Vec2 r_dev, const LinkModel& model) {
    ensure_validity(model, "p_rec_conditional_pdf");
    const double sw = sum_w_cell(model, j, r_dev);
    const double sw2 = sum_w2_cell(model, j, r_dev);
    GaussianMoments g;
    g.mean = model.der.c0 * sw;
    g.sd = model.der.c0 * std::sqrt(model.der.c_ab * sw2);
    return g;
}

double p_rec_conditional_pdf(double p, int j, Vec2 r_dev, const LinkModel& model) {
    const GaussianMoments g = p_rec_conditional_moments(j, r_dev, model);
    const double z = (p - g.mean) / g.sd;
    return std::exp(-0.5 * z * z) / (g.sd * std::sqrt(2.0 * std::numbers::pi));
}

WeightTables WeightTables::build(const LinkModel& model, Vec2 r_dev) {
    WeightTables t;
    t.n_arx = model.cfg.N_arx;
    t.n_grx = model.cfg.N_grx;
    t.n_ary = model.cfg.N_ary;
    t.n_gry = model.cfg.N_gry;
    t.wx.resize(static_cast<size_t>(t.n_arx) * t.n_grx);
    t.wy.resize(static_cast<size_t>(t.n_ary) * t.n_gry);
    const double inv_w2 = 1.0 / (model.cfg.w_z * model.cfg.w_z);
    for (int ix = 0; ix < t.n_arx; ++ix) {
        const double px = ((ix + 1) - 0.5 * (t.n_arx + 1)) * model.cfg.d_ar;
        for (int jx = 0; jx < t.n_grx; ++jx) {
            const double gx = ((jx + 1) - 0.5 * (t.n_grx + 1)) * model.cfg.d_gr;
            const double d = px - gx - r_dev.x;
            t.wx[static_cast<size_t>(ix) * t.n_grx + jx] = std::exp(-2.0 * d * d * inv_w2);
        }
    }
    for (int iy = 0; iy < t.n_ary; ++iy) {
        const double py = ((iy + 1) - 0.5 * (t.n_ary + 1)) * model.cfg.d_ar;
        for (int jy = 0; jy < t.n_gry; ++jy) {
            const double gy = ((jy + 1) - 0.5 * (t.n_gry + 1)) * model.cfg.d_gr;
            const double d = py - gy - r_dev.y;
            t.wy[static_cast<size_t>(iy) * t.n_gry + jy] = std::exp(-2.0 * d * d * inv_w2);
        }
    }
    return t;
}

namespace {

// sum over one axis of w^power factors; the 2D sums below factorize because
// the Gaussian weight separates into x and y parts.
double axis_sum(const std::vector<double>& t, double power) {
    double s = 0;
    if (power == 1.0) {
        for (double v : t) s += v;
    } else {
        for (double v : t) s += v * v; // power == 2
    }
    return s;
}

} // namespace

double sum_w_total(const LinkModel& model, Vec2 r_dev) {
    const WeightTables t = WeightTables::build(model, r_dev);
    return axis_sum(t.wx, 1.0) * axis_sum(t.wy, 1.0);
}

double sum_w2_total(const LinkModel& model, Vec2 r_dev) {
    const WeightTables t = WeightTables::build(model, r_dev);
    return axis_sum(t.wx, 2.0) * axis_sum(t.wy, 2.0);
}

double sum_w_cell(const LinkModel& model, int j, Vec2 r_dev) {
    double s = 0;
    for (int i = 0; i < model.der.N_ar; ++i)
        s += spatial_weight(model.array.positions[i], model.grid.offsets[j], r_dev,
                            model.cfg.w_z);
    return s;
}

double sum_w2_cell(const LinkModel& model, int j, Vec2 r_dev) {
    double s = 0;
    for (int i = 0; i < model.der.N_ar; ++i) {
        const double w = spatial_weight(model.array.positions[i], model.grid.offsets[j],
                                        r_dev, model.cfg.w_z);
        s += w * w;
    }
    return s;
}

int central_cell(const LinkModel& model) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < model.der.N_gr; ++j) {
        const Vec2 o = model.grid.offsets[j];
        const double d = o.x * o.x + o.y * o.y;
        if (d < best_d - 1e-18) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

} // namespace qslink
