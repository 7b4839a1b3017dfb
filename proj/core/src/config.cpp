#include "qslink/config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qslink/errors.hpp"

namespace qslink {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw config_error("config invariant violated: " + what);
}

double resolved_h_la(const SystemConfig& cfg) {
    if (cfg.h_La && cfg.sigma_atm)
        throw config_error("config invariant violated: give h_La or sigma_atm, not both");
    if (cfg.h_La) return *cfg.h_La;
    if (cfg.sigma_atm) return std::exp(-*cfg.sigma_atm * 2.0 * cfg.L_tar);
    return 0.7;
}

double resolved_h_lc(const SystemConfig& cfg) {
    return cfg.h_Lc ? *cfg.h_Lc : 0.8 * cfg.eta_spad;
}

} // namespace

double coherence_length(double lambda, double C_n2, double L_tar) {
    if (!(lambda > 0) || !(C_n2 > 0) || !(L_tar > 0))
        throw config_error("coherence_length requires positive lambda, C_n2, L_tar");
    const double k = 2.0 * std::numbers::pi / lambda;
    return std::pow(0.423 * k * k * C_n2 * L_tar, -3.0 / 5.0);
}

void validate(const SystemConfig& cfg) {
    require(cfg.L_tar > 0, "L_tar > 0");
    require(cfg.lambda > 0, "lambda > 0");
    require(cfg.w_z > 0, "w_z > 0");
    require(cfg.r_ap > 0, "r_ap > 0");
    require(cfg.A_ar > 0, "A_ar > 0");
    require(cfg.N_arx >= 1 && cfg.N_ary >= 1, "N_arx, N_ary >= 1");
    require(cfg.d_ar > 0, "d_ar > 0");
    require(cfg.N_grx >= 1 && cfg.N_gry >= 1, "N_grx, N_gry >= 1");
    require(cfg.d_gr > 0, "d_gr > 0");
    require(cfg.sigma_p >= 0, "sigma_p >= 0");
    require(cfg.alpha > 0 && cfg.beta > 0, "alpha, beta > 0");
    require(cfg.eta_spad > 0 && cfg.eta_spad <= 1, "eta_spad in (0,1]");
    require(cfg.sigma_spad >= 0, "sigma_spad >= 0");
    require(cfg.t_qb > 0, "t_qb > 0");
    require(cfg.t_aq > 0, "t_aq > 0");
    require(cfg.t_j > 0, "t_j > 0");
    require(cfg.mu_t > 0, "mu_t > 0");
    require(cfg.mu_bg >= 0, "mu_bg >= 0");
    require(cfg.P_pol >= 0 && cfg.P_pol <= 1, "P_pol in [0,1]");
    require(cfg.N_s_min >= 1, "N_s_min >= 1");
    require(cfg.m >= 0, "m >= 0");
    require(cfg.speed_of_light > 0, "speed_of_light > 0");
    require(cfg.pos_uncertainty > 0, "pos_uncertainty > 0");
    if (cfg.n_t_min) require(*cfg.n_t_min >= 1, "n_t_min >= 1");

    const double h_la = resolved_h_la(cfg);
    require(h_la > 0 && h_la <= 1, "h_La in (0,1]");
    const double h_lc = resolved_h_lc(cfg);
    require(h_lc > 0 && h_lc <= 1, "h_Lc in (0,1]");

    // elements must not overlap
    require(cfg.d_ar > std::sqrt(cfg.A_ar), "d_ar > sqrt(A_ar)");
    if (cfg.C_n2) {
        require(*cfg.C_n2 > 0, "C_n2 > 0");
        const double r0 = coherence_length(cfg.lambda, *cfg.C_n2, cfg.L_tar);
        // fading independence across CCRs needs spacing beyond the coherence length
        require(cfg.d_ar > r0, "d_ar > r0 (fading independence)");
    }

    // timing consistency: t_aq = N_gr * t_j within one slot
    const double n_gr = static_cast<double>(cfg.N_grx) * cfg.N_gry;
    if (std::abs(cfg.t_aq - n_gr * cfg.t_j) >= cfg.t_qb)
        throw config_error("config invariant violated: t_aq != N_gr * t_j (within one slot)");

    // L_seq and L_sv must be positive integers
    const double l_seq_real = cfg.t_aq / cfg.t_qb;
    const double l_seq_round = std::round(l_seq_real);
    if (l_seq_round < 1 || std::abs(l_seq_real - l_seq_round) > 1e-6 * l_seq_round)
        throw config_error("config invariant violated: L_seq = t_aq/t_qb must be a positive integer");
    const auto l_seq = static_cast<std::int64_t>(l_seq_round);
    if (l_seq % static_cast<std::int64_t>(n_gr) != 0)
        throw config_error("config invariant violated: L_sv = L_seq/N_gr must be a positive integer");
}

DerivedConstants derive_constants(const SystemConfig& cfg) {
    validate(cfg);

    DerivedConstants d;
    d.N_ar = cfg.N_arx * cfg.N_ary;
    d.N_gr = cfg.N_grx * cfg.N_gry;
    d.L_seq = static_cast<std::int64_t>(std::round(cfg.t_aq / cfg.t_qb));
    d.L_sv = d.L_seq / d.N_gr;
    d.lambda_slot = cfg.mu_t * std::exp(-cfg.mu_t);
    d.lambda_grid = static_cast<double>(d.L_sv) * d.lambda_slot;
    d.lambda_total = static_cast<double>(d.N_gr) * d.lambda_grid;
    d.h_La = resolved_h_la(cfg);
    d.h_Lc = resolved_h_lc(cfg);
    d.c_ab = 1.0 / cfg.alpha + 1.0 / cfg.beta + 1.0 / (cfg.alpha * cfg.beta);

    const double lam_l = cfg.lambda * cfg.L_tar;
    d.P_ap = -std::expm1(-2.0 * cfg.A_ar * cfg.r_ap * cfg.r_ap / (lam_l * lam_l));
    d.theta_dev = cfg.lambda / std::sqrt(cfg.A_ar);
    d.w_z2 = cfg.L_tar * d.theta_dev;
    d.c0 = (2.0 * cfg.A_ar / (std::numbers::pi * cfg.w_z * cfg.w_z)) * d.h_La * d.h_Lc * d.P_ap;
    if (cfg.C_n2) d.r0 = coherence_length(cfg.lambda, *cfg.C_n2, cfg.L_tar);
    d.t_ch_true = 2.0 * cfg.L_tar / cfg.speed_of_light;
    d.delta_N_max = static_cast<int>(
        std::ceil(2.0 * cfg.pos_uncertainty / (cfg.speed_of_light * cfg.t_qb)));
    d.prop1_valid = std::sqrt(cfg.A_ar) / cfg.w_z <= 0.5;
    return d;
}

} // namespace qslink
