#pragma once

#include <cstdint>
#include <optional>

namespace qslink {

// Every physical and protocol parameter of one link scenario, in SI base units.
// Defaults are the simulation defaults of the source material's parameter table.
struct SystemConfig {
    double L_tar = 500.0;       // hub-to-target distance (m)
    double lambda = 1550e-9;    // photon wavelength (m)
    double w_z = 0.5;           // beam waist at the target plane (m)
    double r_ap = 0.05;         // receiver aperture radius (m)
    double A_ar = 3e-4;         // effective area per CCR unit (m^2)
    int N_arx = 8;              // CCR count, x axis
    int N_ary = 8;              // CCR count, y axis
    double d_ar = 0.04;         // CCR pitch (m)
    int N_grx = 10;             // scan-grid cells, x axis
    int N_gry = 10;             // scan-grid cells, y axis
    double d_gr = 0.04;         // grid step (m)
    double sigma_p = 0.3;       // pointing-offset std dev per axis (m)
    double alpha = 3.0;         // Gamma-Gamma large-scale parameter
    double beta = 2.0;          // Gamma-Gamma small-scale parameter

    // Atmospheric attenuation: give h_La directly, or sigma_atm to derive
    // h_La = exp(-sigma_atm * 2 L_tar). Neither given -> default 0.7.
    std::optional<double> h_La;
    std::optional<double> sigma_atm; // extinction coefficient (1/m)

    // Coupling loss; absent -> 0.8 * eta_spad (the table couples them).
    std::optional<double> h_Lc;

    double eta_spad = 0.6;      // SPAD detection efficiency
    double sigma_spad = 50e-12; // SPAD timing jitter std dev (s)
    double t_qb = 1e-9;         // qubit slot duration (s)
    double t_aq = 100e-6;       // total acquisition time (s)
    double t_j = 1e-6;          // per-grid-cell dwell time (s)
    double mu_t = 0.5;          // mean photon pairs generated per slot
    double mu_bg = 1e-4;        // mean background photons per slot
    double P_pol = 0.1;         // polarization flip probability
    int N_s_min = 10;           // minimum signal detections for matching
    double m = 3.0;             // background-suppression margin
    std::optional<double> C_n2; // refractive-index structure parameter (m^-2/3)
    double speed_of_light = 299792458.0; // m/s (override 3e8 reproduces slide-rule arithmetic)
    double pos_uncertainty = 1.0;        // coarse target-position uncertainty (m)

    std::optional<int> n_t_min; // explicit detection-threshold override
    bool fading_static_across_grid = false; // hold h_{a,i,.} fixed per trial
};

// Deterministic quantities computed once per scenario.
struct DerivedConstants {
    int N_ar = 0;            // total CCR count
    int N_gr = 0;            // total grid cells
    std::int64_t L_seq = 0;  // total slots per acquisition
    std::int64_t L_sv = 0;   // slots per grid cell
    double lambda_slot = 0;  // per-slot single-pair probability mu_t e^{-mu_t}
    double lambda_grid = 0;  // expected valid slots per grid cell
    double lambda_total = 0; // expected valid slots per acquisition
    double h_La = 0;         // resolved atmospheric attenuation
    double h_Lc = 0;         // resolved coupling loss
    double c0 = 0;           // deterministic channel scalar of the reception model
    double c_ab = 0;         // Gamma-Gamma variance 1/a + 1/b + 1/(ab)
    double P_ap = 0;         // receiver-aperture capture probability
    double theta_dev = 0;    // diffraction divergence of the returned beam (rad)
    double w_z2 = 0;         // returned-beam waist at the receiver plane (m)
    std::optional<double> r0; // atmospheric coherence length (m), when C_n2 given
    double t_ch_true = 0;    // true round-trip delay 2 L_tar / c (s)
    int delta_N_max = 0;     // alignment search half-width (slots)
    bool prop1_valid = false; // sqrt(A_ar)/w_z <= 0.5 validity region
};

// Throws config_error naming the violated invariant.
void validate(const SystemConfig& cfg);

// Validates cfg, then computes every derived field. Pure: same cfg, same bits.
DerivedConstants derive_constants(const SystemConfig& cfg);

// r0 = [0.423 k^2 C_n2 L]^{-3/5}, k = 2 pi / lambda.
double coherence_length(double lambda, double C_n2, double L_tar);

} // namespace qslink
