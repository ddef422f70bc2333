#include "sfflab/rydberg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfflab/errors.hpp"
#include "sfflab/models.hpp"
#include "sfflab/spectra.hpp"

namespace sfflab {

using std::numbers::pi;

void RydbergConfig::validate() const {
    if (!(xi > 0.0 && xi < 0.5))
        throw config_error("rydberg: xi must be in (0, 0.5) (perturbative dressing)");
    if (detuning == 0.0) throw config_error("rydberg: detuning must be nonzero");
}

double RingGeometry::chord(int i, int j) const {
    const int d = std::abs(i - j);
    return 2.0 * radius * std::sin(pi * d / sites);
}

double RingGeometry::azimuth(int i, int j) const {
    const double ai = 2.0 * pi * i / sites, aj = 2.0 * pi * j / sites;
    const double dx = std::cos(aj) - std::cos(ai);
    const double dy = std::sin(aj) - std::sin(ai);
    return std::atan2(dy, dx);
}

bool RingGeometry::valid(std::string* why) const {
    if (sites < 3) {
        if (why) *why = "ring needs at least 3 atoms";
        return false;
    }
    const double nearest = chord(0, 1);
    if (nearest < r_c) {
        if (why) {
            std::ostringstream os;
            os << "nearest chord " << nearest << " um below critical radius " << r_c << " um";
            *why = os.str();
        }
        return false;
    }
    if (r_c_prime > 0.0 && radius < r_c_prime) {
        if (why) *why = "ring radius below control-simulator critical radius";
        return false;
    }
    return true;
}

CMat d0_matrix(double theta, double phi) {
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double s1 = std::sin(theta);
    const cplx em = std::polar(1.0, -phi), ep = std::polar(1.0, phi);
    const cplx em2 = std::polar(1.0, -2.0 * phi), ep2 = std::polar(1.0, 2.0 * phi);
    CMat m(4);
    m.at(0, 0) = (3.0 * c2 - 1.0) / 81.0;
    m.at(0, 1) = 4.0 * em * s2 / 27.0;
    m.at(0, 2) = 4.0 * em * s2 / 27.0;
    m.at(0, 3) = 2.0 * em2 * s1 * s1 / 27.0;
    m.at(1, 0) = ep * s2 / 27.0;
    m.at(1, 1) = (1.0 - 3.0 * c2) / 81.0;
    m.at(1, 2) = (-5.0 - 3.0 * c2) / 81.0;
    m.at(1, 3) = -4.0 * em * s2 / 27.0;
    m.at(2, 0) = ep * s2 / 27.0;
    m.at(2, 1) = (-5.0 - 3.0 * c2) / 81.0;
    m.at(2, 2) = (1.0 - 3.0 * c2) / 81.0;
    m.at(2, 3) = -4.0 * em * s2 / 27.0;
    m.at(3, 0) = 2.0 * ep2 * s1 * s1 / 27.0;
    m.at(3, 1) = -4.0 * ep * s2 / 27.0;
    m.at(3, 2) = -4.0 * ep * s2 / 27.0;
    m.at(3, 3) = (3.0 * c2 - 1.0) / 81.0;
    return m;
}

PairCouplings vdw_pair(double c6, double c6_tilde, double r, double phi,
                       double r_critical) {
    if (!(r > 0.0)) throw config_error("vdw_pair: r must be > 0");
    const double r6 = std::pow(r, 6);
    PairCouplings p;
    p.w_pp = (c6 - 4.0 / 81.0 * c6_tilde) / r6;
    p.w_pm = (c6 + 4.0 / 81.0 * c6_tilde) / r6;
    p.v_pm = -2.0 / 81.0 * c6_tilde / r6;
    p.v_pp = -2.0 / 27.0 * c6_tilde / r6 * std::polar(1.0, -2.0 * phi);
    p.below_critical = r_critical > 0.0 && r < r_critical;
    return p;
}

BlockadeResult blockade(double c6_prime, double r, double detuning) {
    if (!(r > 0.0)) throw config_error("blockade: r must be > 0");
    if (detuning == 0.0) throw config_error("blockade: detuning must be nonzero");
    BlockadeResult b;
    b.shift = c6_prime / std::pow(r, 6);
    b.radius = std::pow(std::abs(c6_prime / detuning), 1.0 / 6.0);
    return b;
}

DressedCouplings dressed_couplings(const PairCouplings& pair, double detuning,
                                   double xi, const std::string& pair_label) {
    const double d2 = 2.0 * detuning;
    const double v = pair.v_pm, wpm = pair.w_pm, wpp = pair.w_pp;
    const double den1 = v - wpm - d2;       // (V+- - W+- - 2 Delta)
    const double den2 = d2 + v + wpm;       // (2 Delta + V+- + W+-)
    const double den3 = d2 + wpm;           // (2 Delta + W+-)
    const double den4 = d2 + wpp;           // (2 Delta + W++)
    const double tol = 1e-6 * std::abs(d2);
    for (double den : {den1, den2, den3, den4})
        if (std::abs(den) < tol)
            throw numerical_error("dressed_couplings: dressing resonance (vanishing "
                                  "denominator) at pair " +
                                  (pair_label.empty() ? std::string("?") : pair_label));

    const double xi2 = xi * xi, xi4 = xi2 * xi2;
    DressedCouplings out;
    out.j_xy = -2.0 * detuning * detuning * xi4 * v / (den1 * den2);
    out.j_z = -2.0 * detuning * detuning * xi4 *
              (v * v - den3 * (wpm - wpp)) / (den3 * den1 * den2);
    out.beta = -2.0 * detuning * xi2 +
               2.0 * detuning * xi4 *
                   (v * v * (3.0 * detuning + 2.0 * wpp) -
                    den3 * (4.0 * detuning * detuning +
                            3.0 * detuning * (wpm + wpp) + 2.0 * wpm * wpp)) /
                   (den4 * (v - d2 - wpm) * den2);
    return out;
}

RingModel build_ring_model(const RydbergConfig& cfg, const RingGeometry& geom,
                           double electronic_offset) {
    cfg.validate();
    const int L = geom.sites;
    std::string why;
    RingModel model;
    model.sites = L;
    if (!geom.valid(&why)) model.warnings.push_back("geometry: " + why);

    const BlockadeResult b = blockade(cfg.c6_prime, geom.radius, cfg.detuning);
    if (b.radius > 0.0 && geom.radius > 0.75 * b.radius)
        model.warnings.push_back("geometry: R exceeds 0.75 R_b; blockade suppression degrades");

    // control atom excited: detuning shifts by the blockade; Omega is fixed
    // by the lasers, so xi rescales with the detuning
    const double dp = cfg.detuning - b.shift;
    if (dp == 0.0) throw numerical_error("build_ring_model: shifted detuning vanishes");
    const double xip = cfg.xi * cfg.detuning / dp;

    const std::size_t n2 = static_cast<std::size_t>(L) * L;
    model.j_xy.assign(n2, 0.0);
    model.j_z.assign(n2, 0.0);
    model.jp_xy.assign(n2, 0.0);
    model.jp_z.assign(n2, 0.0);
    model.beta.assign(n2, 0.0);
    model.beta_prime.assign(n2, 0.0);

    double beta_sum = 0.0, beta_prime_sum = 0.0;
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            const double r = geom.chord(i, j);
            const double phi = geom.azimuth(i, j);
            const PairCouplings pc = vdw_pair(cfg.c6, cfg.c6_tilde, r, phi, geom.r_c);
            if (pc.below_critical)
                model.warnings.push_back("pair (" + std::to_string(i) + "," +
                                         std::to_string(j) +
                                         ") below critical radius; vdW form invalid there");
            const std::string label =
                "(" + std::to_string(i) + "," + std::to_string(j) + ")";
            const DressedCouplings dc = dressed_couplings(pc, cfg.detuning, cfg.xi, label);
            const DressedCouplings dcp = dressed_couplings(pc, dp, xip, label + "'");
            const std::size_t a = static_cast<std::size_t>(i) * L + j;
            const std::size_t at = static_cast<std::size_t>(j) * L + i;
            model.j_xy[a] = model.j_xy[at] = dc.j_xy;
            model.j_z[a] = model.j_z[at] = dc.j_z;
            model.jp_xy[a] = model.jp_xy[at] = dcp.j_xy;
            model.jp_z[a] = model.jp_z[at] = dcp.j_z;
            model.beta[a] = dc.beta;
            model.beta_prime[a] = dcp.beta;
            beta_sum += dc.beta;
            beta_prime_sum += dcp.beta;
        }
    model.delta_offset = (beta_prime_sum - beta_sum) + electronic_offset;
    model.j_unit = std::abs(model.j_xy[1]);  // nearest-neighbour pair (0,1)
    return model;
}

double spectral_range(const RingModel& model, bool primed) {
    const int L = model.sites;
    const std::vector<double>& jxy = primed ? model.jp_xy : model.j_xy;
    const std::vector<double>& jz = primed ? model.jp_z : model.j_z;
    const std::vector<double> zero_fields(L, 0.0);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int sz = -L; sz <= L; sz += 2) {
        const SectorBasis sector = sector_basis(L, sz);
        if (sector.dim() == 1) {
            // fully polarized: diagonal energy sum_{i<j} J^z_ij
            double e = 0.0;
            for (int i = 0; i < L; ++i)
                for (int j = i + 1; j < L; ++j)
                    e += jz[static_cast<std::size_t>(i) * L + j];
            lo = first ? e : std::min(lo, e);
            hi = first ? e : std::max(hi, e);
            first = false;
            continue;
        }
        const HermitianOperator h = build_xxz(L, jxy, jz, zero_fields, &sector);
        const Spectrum s = eig_hermitian(h, false);
        lo = first ? s.eigenvalues.front() : std::min(lo, s.eigenvalues.front());
        hi = first ? s.eigenvalues.back() : std::max(hi, s.eigenvalues.back());
        first = false;
    }
    return hi - lo;
}

DecoherenceBudget decoherence_budget(const RydbergConfig& cfg,
                                     const RingGeometry& geom,
                                     const RingModel& model) {
    DecoherenceBudget b;
    b.h_range = spectral_range(model, false);
    b.hp_range = spectral_range(model, true);
    if (!(b.h_range > 0.0))
        throw numerical_error("decoherence_budget: |H_spin| vanished");
    b.kappa1 = cfg.gamma_d_prime / b.h_range;
    b.kappa2 = cfg.xi * cfg.xi * cfg.gamma_d * geom.sites / b.h_range;
    b.kappa3 = b.hp_range / b.h_range;
    b.blockade_radius = blockade(cfg.c6_prime, geom.radius, cfg.detuning).radius;
    b.kappa3_analytic = std::pow(geom.radius / b.blockade_radius, 24.0);
    const double kappa_max = std::max({b.kappa1, b.kappa2, b.kappa3});
    if (kappa_max > 0.0) {
        b.t_coh_us = 1.0 / (2.0 * pi * b.h_range * kappa_max);
        b.t_coh_inv_j = model.j_unit > 0.0 ? model.j_unit / (b.h_range * kappa_max) : 0.0;
    }
    return b;
}

int max_ring_atoms(double r_c, double r_max) {
    if (!(r_c > 0.0) || !(r_max > 0.0))
        throw config_error("max_ring_atoms: radii must be > 0");
    if (r_c >= 2.0 * r_max)
        throw config_error("max_ring_atoms: r_c >= 2 R_max leaves no valid ring");
    const double l = pi / std::asin(r_c / (2.0 * r_max));
    if (l > 1e6) throw config_error("max_ring_atoms: unbounded ring (r_c too small)");
    return static_cast<int>(std::floor(l + 1e-9));  // exact geometric fits land on integers
}

StroboscopicPhase stroboscopic_phase(double omega, double omega_lg, double t1,
                                     double t2, double phi) {
    if (t1 < 0.0 || t2 < 0.0 || t1 + t2 <= 0.0)
        throw config_error("stroboscopic_phase: need t1, t2 >= 0 with t1 + t2 > 0");
    const double period = t1 + t2;
    const double re = t1 * omega + t2 * omega_lg * std::cos(phi);
    const double im = t2 * omega_lg * std::sin(phi);
    StroboscopicPhase out;
    out.amplitude = std::sqrt(re * re + im * im) / period;
    out.phase = (im == 0.0 && re == 0.0) ? 0.0 : std::atan2(im, re);
    return out;
}

}  // namespace sfflab
