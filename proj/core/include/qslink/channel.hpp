#pragma once

#include <vector>

#include "qslink/config.hpp"
#include "qslink/geometry.hpp"
#include "qslink/rng.hpp"

namespace qslink {

// Everything one scenario needs, realized once: config, derived constants,
// CCR lattice, scan grid. All channel/analytic/simulator entry points take it.
struct LinkModel {
    SystemConfig cfg;
    DerivedConstants der;
    CcrArrayGeometry array;
    ScanGrid grid;

    static LinkModel build(const SystemConfig& cfg);
};

// One draw of the random channel: pointing offset plus the per-(CCR, grid-cell)
// fading matrix, row-major h[i * N_gr + j]. All entries > 0.
struct ChannelRealization {
    Vec2 r_dev;
    std::vector<double> fading;
    int n_ar = 0;
    int n_gr = 0;

    double h(int i, int j) const { return fading[static_cast<size_t>(i) * n_gr + j]; }
};

// Draws r_dev then the fading matrix (grid-cell-major, fresh per cell unless
// cfg.fading_static_across_grid repeats one draw across cells).
ChannelRealization sample_channel(const LinkModel& model, RngStream& rng);

// Gaussian-beam intensity coupling: w = exp(-2 ||p_ar - p_grid - r_dev||^2 / w_z^2).
double spatial_weight(Vec2 p_ar, Vec2 grid_offset, Vec2 r_dev, double w_z);

// Probability a photon hits CCR i and is captured at the receiver, beam aimed
// at cell j with pointing offset r_dev:
//   (2 A_ar / (pi w_z^2)) * w_{i,j,r_dev} * P_ap.
// Throws model_error outside the validity region or if the value reaches 1.
double p_hap(int i, int j, Vec2 r_dev, const LinkModel& model);

// Exact counterpart of the closed-form hit factor: the beam intensity
// integrated over a square CCR aperture of area A_ar by tensor Gauss-Legendre
// quadrature. Converged to ~1e-8 relative by order ~20 for sqrt(A_ar)/w_z <= 0.5;
// throws numeric_error if doubling the order still moves the result.
double p_hit_oracle(Vec2 ccr_pos, Vec2 beam_center, double A_ar, double w_z,
                    int quad_order);

// Fading-weighted single-slot reception probability for grid cell j:
//   P_rec,j = c0 * sum_i h_{a,i,j} w_{i,j,r_dev}.
// Throws model_error if the sum reaches 1 (invalid scenario, not clamped).
double p_rec_slot(int j, const ChannelRealization& real, const LinkModel& model);

// Mean detected photons per slot: mu_ch,j = eta_spad * P_rec,j.
double mu_ch_slot(int j, const ChannelRealization& real, const LinkModel& model);

struct GaussianMoments {
    double mean = 0;
    double sd = 0;
};

// CLT moments of P_rec,j over fading at fixed r_dev:
// mean c0 sum_i w, variance c0^2 c_ab sum_i w^2.
GaussianMoments p_rec_conditional_moments(int j, Vec2 r_dev, const LinkModel& model);

// Gaussian density of P_rec,j at p with the moments above.
double p_rec_conditional_pdf(double p, int j, Vec2 r_dev, const LinkModel& model);

// Per-axis weight factor tables enabling O(nx + ny) separable sums:
// w_{i,j} = wx[ix, jx] * wy[iy, jy].
struct WeightTables {
    std::vector<double> wx; // [N_arx * N_grx], CCR-axis-major
    std::vector<double> wy; // [N_ary * N_gry]
    int n_arx = 0, n_grx = 0, n_ary = 0, n_gry = 0;

    static WeightTables build(const LinkModel& model, Vec2 r_dev);
    double w(int ix, int iy, int jx, int jy) const {
        return wx[static_cast<size_t>(ix) * n_grx + jx] * wy[static_cast<size_t>(iy) * n_gry + jy];
    }
};

// Separable full-aggregate sums over all (i, j):
double sum_w_total(const LinkModel& model, Vec2 r_dev);   // sum of w
double sum_w2_total(const LinkModel& model, Vec2 r_dev);  // sum of w^2

// Per-cell sums over CCRs i for a fixed cell j:
double sum_w_cell(const LinkModel& model, int j, Vec2 r_dev);
double sum_w2_cell(const LinkModel& model, int j, Vec2 r_dev);

// Index of the grid cell whose offset is closest to the origin (ties toward
// the smaller linear index) -- "the central cell" in validation language.
int central_cell(const LinkModel& model);

} // namespace qslink
