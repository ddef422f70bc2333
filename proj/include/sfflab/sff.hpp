#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfflab/spectra.hpp"

namespace sfflab {

// Normalized spectral filter f(E_l), sum_l f = 1.
struct FilterSpec {
    enum class Kind { flat, gaussian, pea };

    Kind kind = Kind::flat;
    double center = 0.0;  // delta
    double width = 1.0;   // gaussian Delta_E
    int steps = 0;        // pea M
    double t0 = 1.0;      // pea base time

    static FilterSpec flat() { return {}; }
    static FilterSpec gaussian(double center, double width);
    static FilterSpec pea(int steps, double t0, double center);

    std::string describe() const;
};

// The M-readout postselection filter
//   P(x) = [ sin(2^M t0 x) / (2^M sin(t0 x)) ]^2,  x = E - delta,
// with the removable singularities at t0 x = k*pi evaluated by limit (value 1).
double pea_filter_value(double x, int steps, double t0);

// Unnormalized filter values at the given energies.
std::vector<double> filter_values_raw(const FilterSpec& f,
                                      const std::vector<double>& energies);

// Normalized weights; throws numerical_error if the filter misses the
// spectrum (all-zero weights).
std::vector<double> filter_values(const FilterSpec& f,
                                  const std::vector<double>& energies);

struct SffCurveMeta {
    int n_disorder = 1;
    long long n_shots = 0;   // per quadrature per point per disorder; 0 = exact
    int n_reuse = 1;
    std::string filter;
    std::string model_hash;
};

struct SffCurve {
    std::vector<double> times;
    std::vector<double> k;
    std::vector<double> stderr_k;  // per-point standard error (0 for single curves)
    SffCurveMeta meta;
};

struct TimeGrid {
    enum class Spacing { linear, log };
    static std::vector<double> make(double t_min, double t_max, int points,
                                    Spacing spacing);
    static std::vector<double> integer_steps(int t_max);  // 0, 1, ..., t_max
};

// K(tau) = |sum_l f_l e^{-i E_l tau}|^2 for one realization.
SffCurve exact_sff(const Spectrum& spec, const std::vector<double>& weights,
                   const std::vector<double>& times);

// Floquet version on the integer grid 0..t_max: K(t) = |sum_l f_l e^{-i lambda_l theta t}|^2.
SffCurve exact_sff_floquet(const Spectrum& quasi, const std::vector<double>& weights,
                           int t_max);

// K_infinity = sum_l f_l^2
double k_infinity(const std::vector<double>& weights);

enum class RmtEnsemble { goe, gue, coe, cue };

RmtEnsemble parse_ensemble(const std::string& s);
std::string ensemble_name(RmtEnsemble e);

// GOE/GUE need {tau_h, k_inf}; COE/CUE need dim (tau_h = dim, k_inf = 1/dim).
struct RmtParams {
    double tau_h = 0.0;
    double k_inf = 0.0;
    int dim = 0;
};

double rmt_value(RmtEnsemble e, const RmtParams& p, double t);
SffCurve rmt_baseline(RmtEnsemble e, const RmtParams& p,
                      const std::vector<double>& times);

// Earliest grid time from which |K/K_baseline - 1| < epsilon holds for
// `sustain` consecutive grid points; nullopt when never sustained.
std::optional<double> thouless_time(const SffCurve& curve, const SffCurve& baseline,
                                    double epsilon = 0.3, int sustain = 5);

// Streaming per-point mean/variance merge for disorder averaging.
class CurveAccumulator {
public:
    explicit CurveAccumulator(std::vector<double> times);

    void add(const std::vector<double>& k_values);
    int count() const { return n_; }
    SffCurve finish(SffCurveMeta meta) const;

private:
    std::vector<double> times_;
    std::vector<double> mean_;
    std::vector<double> m2_;
    int n_ = 0;
};

}  // namespace sfflab
