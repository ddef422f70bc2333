#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfflab/rng.hpp"
#include "sfflab/sff.hpp"
#include "sfflab/spectra.hpp"

namespace sfflab {

// Weights over energy eigenstates; the protocol's only state object. Either
// normalized (total == 1) or carried unnormalized with the recorded total.
struct DiagonalEnsemble {
    std::vector<double> weights;
    double total = 1.0;

    static DiagonalEnsemble infinite_temperature(int dim);
    DiagonalEnsemble normalized() const;
    void validate_normalized() const;
};

// Readout probability after one QND cycle of duration t:
//   p(+) = cos^2((E - delta) t / 2),  p(-) = 1 - p(+).
// The pair sums to 1 exactly by construction.
double readout_probability(double energy, double t, double delta, bool plus);

// Conditional weight update of one readout, unnormalized:
// w_l -> w_l * p(outcome | E_l). Averaging the two outcomes returns the
// input weights exactly (the QND non-demolition identity).
std::vector<double> readout_update(const std::vector<double>& weights,
                                   const std::vector<double>& energies,
                                   double t, double delta, bool plus);

// Preparation schedule: M postselected readouts whose accumulated filter is
// the pea filter with parameters (M, t0, delta). Step m flips "+" with
// probability cos^2(2^m t0 (E - delta)), i.e. a QND interaction of duration
// 2^{m+1} t0; t0 here is the filter parameter of the closed form
// [sin(2^M t0 x)/(2^M sin(t0 x))]^2.
struct PrepConfig {
    int steps = 3;                       // M
    std::optional<double> t0;            // filter base time; nullopt -> auto
    std::optional<double> center;        // delta; nullopt -> spectrum center

    // auto rule: delta = (E_max + E_min)/2, t0 = pi / (2 |E - delta|_max),
    // the largest t0 for which the realized spectrum spans one filter period.
    void resolve(const std::vector<double>& energies, double& t0_out,
                 double& delta_out) const;
};

struct PrepResult {
    DiagonalEnsemble rho_mc;  // normalized
    double p_mc = 0.0;
};

// p_l = P(+_0..+_{M-1}, E_l - delta) <l|rho_in|l>; p_mc = sum p_l.
PrepResult prepare_mc(const Spectrum& spec, int steps, double t0, double delta,
                      const DiagonalEnsemble& rho_in);

// Per-step "+" probabilities, table [m][l]; the row product over m equals the
// pea filter at E_l.
std::vector<std::vector<double>> prep_step_probabilities(
    const std::vector<double>& energies, int steps, double t0, double delta);

// One preparation attempt: sample l ~ rho_in, then the M postselected
// readouts. Returns the eigenstate index on success. Exactly equivalent to
// the sequential collapse because rho_in is a classical mixture.
std::optional<int> sample_prep_trajectory(
    const std::vector<std::vector<double>>& step_probs,
    const std::vector<double>& rho_in_cdf, Rng& rng);

std::vector<double> ensemble_cdf(const DiagonalEnsemble& rho);

// N two-outcome shots per quadrature at evolution time tau; fresh eigenstate
// drawn per shot from the ensemble. Returns (m_x, m_y) in [-1, 1].
std::pair<double, double> measure_sff_point(const Spectrum& spec,
                                            const DiagonalEnsemble& rho,
                                            double tau, int shots, Rng& rng);

// Recycled measurement of one prepared copy (fixed eigenstate l): N shots per
// quadrature at every tau; all draws independent Bernoulli given l.
struct QuadratureMeans {
    double mx = 0.0;
    double my = 0.0;
};
std::vector<QuadratureMeans> run_with_recycling(int eigenstate,
                                                const Spectrum& spec,
                                                const std::vector<double>& taus,
                                                int shots, Rng& rng);

// Bias-corrected SFF estimator: K = N/(N-1) (m_x^2 + m_y^2 - 2/N).
double estimate_k(double mx, double my, int shots);

// var[K] = 4K/N + 4/N^2; SNR = K/sqrt(var);
// K*^(1) = 2(1+sqrt 2)/N, K* = K*^(1)/sqrt(N_d).
double variance_model(double k, int shots);
double snr(double k, int shots);
double k_star_single(int shots);
double k_star(int shots, int n_disorder);

// Heisenberg-time and plateau estimators from the measured preparation
// success probability alone.
double estimate_heisenberg(double p_mc, int steps, double t0, int dim);
double estimate_plateau(double p_mc, int dim);

// ---------------------------------------------------------------------------
// Full experiment runner

enum class ModelKind { heisenberg, floquet_heisenberg, kicked_ising_2, kicked_ising_3 };
enum class FloquetSampling { eigenbasis, product_state };

// Filter for the exact (numerical-prediction) curves. The measurement always
// uses the preparation's pea filter; gaussian_sixth swaps only the exact
// curve to a gaussian of width (E_max - E_min)/6 centered at delta, for
// filter-independence studies.
enum class ExactFilter { protocol_pea, gaussian_sixth };

ModelKind parse_model_kind(const std::string& s);
std::string model_kind_name(ModelKind k);

struct ShotPlan {
    int shots = 100;             // N per quadrature per time point
    int disorders = 20;          // N_d
    int reuse = 10;              // N_reuse
    std::uint64_t master_seed = 1;

    void validate() const;
};

struct ExperimentSpec {
    ModelKind kind = ModelKind::heisenberg;
    SpinModelSpec model;
    DisorderLaw law = DisorderLaw::uniform;
    double theta = 1.0;  // Floquet period (1/J)
    PrepConfig prep;
    ShotPlan plan;
    std::vector<double> times;  // for floquet kinds: integer grid 0..t_max
    bool measure = true;        // false -> exact curves only
    ExactFilter exact_filter = ExactFilter::protocol_pea;
    FloquetSampling sampling = FloquetSampling::eigenbasis;
    double t_coh = 0.0;         // metadata annotation only; 0 = unset

    bool is_floquet() const { return kind != ModelKind::heisenberg; }
};

// Per-time-point record of one realization's measurement.
struct MeasurementRecord {
    double tau = 0.0;
    double mx = 0.0;
    double my = 0.0;
    double k_hat = 0.0;
    double modeled_variance = 0.0;  // 4K/N + 4/N^2 at max(k_hat, 0)
};

struct RealizationOutcome {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    double p_mc = 1.0;
    double t0 = 0.0;
    double delta = 0.0;
    double tau_h_estimate = 0.0;   // 2^{M+1} t0 D p_mc
    double k_inf_estimate = 0.0;   // (2/3)/(D p_mc)
    double tau_h_spectral = 0.0;   // 2 pi / delta_E (central third)
    double k_inf_filter = 0.0;     // sum f^2 of the realized filter
    std::uint64_t prep_attempts = 0;
    std::uint64_t prep_successes = 0;
    bool coherence_budget_exceeded = false;
    std::vector<double> k_exact;
    std::vector<double> k_measured;
    std::vector<double> mx, my;
};

struct ExperimentResult {
    SffCurve exact;
    SffCurve measured;  // empty times when spec.measure == false
    std::vector<RealizationOutcome> realizations;
    int dim = 0;
    double mean_p_mc = 0.0;
    double mean_tau_h_estimate = 0.0;
    double mean_k_inf_estimate = 0.0;
    double mean_tau_h_spectral = 0.0;
    double mean_k_inf_filter = 0.0;
    double k_star_threshold = 0.0;
    double n_run_per_point_formula = 0.0;  // N_d N / (p_mc N_reuse)
    double n_run_per_point_actual = 0.0;   // prep attempts per grid point
    int n_failed = 0;
    bool complete = true;
};

// One disorder realization end to end: diagonalize -> (prepare) -> measure
// every tau with recycling. Pure function of (spec, index).
RealizationOutcome run_realization(const ExperimentSpec& spec, int index);

std::vector<MeasurementRecord> measurement_records(const RealizationOutcome& r,
                                                   const std::vector<double>& times,
                                                   int shots);

// Disorder sweep; workers <= 0 means hardware concurrency. Aggregation order
// is by realization index, independent of scheduling. `cancel`, when set,
// stops new realizations and marks the result incomplete.
ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 0,
                                const std::atomic<bool>* cancel = nullptr);

}  // namespace sfflab
