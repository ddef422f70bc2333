#pragma once

#include <array>
#include <string>
#include <vector>

#include "sfflab/linalg.hpp"

namespace sfflab {

// Units in this module: energies/rates in MHz (ordinary frequency), lengths
// in micrometers. A single conversion point maps |J_xy(nearest)| to the
// dimensionless J = 1 of the simulation core.

struct RydbergConfig {
    double c6 = 0.0;        // simulator-pair isotropic vdW constant, MHz um^6
    double c6_tilde = 0.0;  // simulator-pair anisotropic constant, MHz um^6
    double c6_prime = 0.0;  // control-simulator constant, MHz um^6
    double detuning = -9.0; // dressing detuning Delta, MHz
    double xi = 0.2;        // Omega/Delta
    double delta_b = 0.0;   // two-photon field splitting, MHz (metadata)
    double gamma_d = 0.0;       // simulator Rydberg decay, MHz
    double gamma_d_prime = 0.0; // control Rydberg decay, MHz

    void validate() const;
};

struct RingGeometry {
    int sites = 12;
    double radius = 5.0;     // um
    double r_c = 2.4;        // simulator-simulator critical radius, um
    double r_c_prime = 0.0;  // control-simulator critical radius, um

    double chord(int i, int j) const;     // 2 R sin(pi |i-j| / L)
    double azimuth(int i, int j) const;   // in-plane angle of the pair axis
    bool valid(std::string* why = nullptr) const;
};

// Pairwise vdW couplings in the {r+ r+, r+ r-, r- r+, r- r-} manifold.
struct PairCouplings {
    double w_pp = 0.0;   // W++ = W--
    double w_pm = 0.0;   // W+- = W-+
    double v_pm = 0.0;   // V+- = V-+
    cplx v_pp;           // V++ = conj(V--)
    bool below_critical = false;
};

// The 4x4 angular matrix of the vdW interaction, entries as printed.
CMat d0_matrix(double theta, double phi);

// W++ = (C6 - 4 C~6/81)/r^6, W+- = (C6 + 4 C~6/81)/r^6,
// V+- = -(2/81) C~6/r^6,     V++ = -(2/27) C~6 e^{-2 i phi}/r^6.
PairCouplings vdw_pair(double c6, double c6_tilde, double r, double phi,
                       double r_critical = 0.0);

struct BlockadeResult {
    double shift = 0.0;   // C6'/r^6
    double radius = 0.0;  // R_b = |C6'/Delta|^{1/6}
};
BlockadeResult blockade(double c6_prime, double r, double detuning);

struct DressedCouplings {
    double j_xy = 0.0;  // MHz
    double j_z = 0.0;   // MHz
    double beta = 0.0;  // MHz, spin-independent shift per pair
};

// Fourth-order dressed couplings; xi is Omega/Delta evaluated at the SAME
// detuning passed here. Near-resonant denominators raise numerical_error
// naming the offending pair.
DressedCouplings dressed_couplings(const PairCouplings& pair, double detuning,
                                   double xi, const std::string& pair_label = "");

struct RingModel {
    int sites = 0;
    // symmetric L x L tables, MHz; primed = control atom excited
    std::vector<double> j_xy, j_z, jp_xy, jp_z;
    std::vector<double> beta, beta_prime;    // upper-triangle pair values at (i*L+j)
    double delta_offset = 0.0;               // sum (beta' - beta) + electronic offset
    double j_unit = 0.0;                     // |J_xy(nearest)| in MHz -> J = 1
    std::vector<std::string> warnings;
};

RingModel build_ring_model(const RydbergConfig& cfg, const RingGeometry& geom,
                           double electronic_offset = 0.0);

struct DecoherenceBudget {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;          // numeric |H'|/|H|
    double kappa3_analytic = 0.0; // (R/R_b)^24
    double h_range = 0.0;         // |H_spin|, MHz
    double hp_range = 0.0;        // |H'_spin|, MHz
    double t_coh_us = 0.0;        // 1/(2 pi |H| max kappa)
    double t_coh_inv_j = 0.0;     // in units of 1/J
    double blockade_radius = 0.0; // um
};

// Spectral ranges |H| are max - min eigenvalue over the full space, computed
// sector by sector (the exported model conserves Sz).
double spectral_range(const RingModel& model, bool primed);

DecoherenceBudget decoherence_budget(const RydbergConfig& cfg,
                                     const RingGeometry& geom,
                                     const RingModel& model);

// floor(pi / asin(r_c / (2 R_max)))
int max_ring_atoms(double r_c, double r_max);

struct StroboscopicPhase {
    double amplitude = 0.0;  // |Omega_eff|
    double phase = 0.0;      // phi_eff
};

// Time-shared plane-wave / Laguerre-Gaussian dressing:
// Omega_eff = (t1 Omega + t2 Omega_LG e^{i phi}) / (t1 + t2).
StroboscopicPhase stroboscopic_phase(double omega, double omega_lg, double t1,
                                     double t2, double phi);

}  // namespace sfflab
