#include "sfflab/sff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfflab/errors.hpp"

namespace sfflab {

FilterSpec FilterSpec::gaussian(double center, double width) {
    if (width <= 0.0) throw config_error("gaussian filter: width must be > 0");
    FilterSpec f;
    f.kind = Kind::gaussian;
    f.center = center;
    f.width = width;
    return f;
}

FilterSpec FilterSpec::pea(int steps, double t0, double center) {
    if (steps < 0) throw config_error("pea filter: M must be >= 0");
    if (t0 <= 0.0) throw config_error("pea filter: t0 must be > 0");
    FilterSpec f;
    f.kind = Kind::pea;
    f.steps = steps;
    f.t0 = t0;
    f.center = center;
    return f;
}

std::string FilterSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::flat: os << "flat"; break;
        case Kind::gaussian: os << "gaussian(center=" << center << ",width=" << width << ")"; break;
        case Kind::pea: os << "pea(M=" << steps << ",t0=" << t0 << ",center=" << center << ")"; break;
    }
    return os.str();
}

double pea_filter_value(double x, int steps, double t0) {
    if (steps == 0) return 1.0;
    const double u = t0 * x;
    const double scale = static_cast<double>(1LL << steps);  // 2^M
    const double s = std::sin(u);
    // near u = k*pi both sin(2^M u) and 2^M sin(u) vanish; the ratio tends
    // to +-1, so the squared filter tends to 1
    if (std::abs(s) < 1e-9) {
        const double k = std::round(u / std::numbers::pi);
        const double eps = u - k * std::numbers::pi;
        if (std::abs(eps) < 1e-12) return 1.0;
        const double num = std::sin(scale * eps);  // |sin(2^M u)| up to sign
        const double den = scale * std::sin(eps);
        const double r = num / den;
        return r * r;
    }
    const double r = std::sin(scale * u) / (scale * s);
    return r * r;
}

std::vector<double> filter_values_raw(const FilterSpec& f,
                                      const std::vector<double>& energies) {
    std::vector<double> w(energies.size());
    switch (f.kind) {
        case FilterSpec::Kind::flat:
            std::fill(w.begin(), w.end(), 1.0);
            break;
        case FilterSpec::Kind::gaussian:
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double x = (energies[i] - f.center) / f.width;
                w[i] = std::exp(-0.5 * x * x);
            }
            break;
        case FilterSpec::Kind::pea:
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = pea_filter_value(energies[i] - f.center, f.steps, f.t0);
            break;
    }
    return w;
}

std::vector<double> filter_values(const FilterSpec& f,
                                  const std::vector<double>& energies) {
    if (energies.empty()) throw config_error("filter_values: empty spectrum");
    std::vector<double> w = filter_values_raw(f, energies);
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 1e-300))
        throw numerical_error("filter misses the spectrum (all weights ~ 0): " + f.describe());
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> TimeGrid::make(double t_min, double t_max, int points,
                                   Spacing spacing) {
    if (points < 2) throw config_error("grid: need at least 2 points");
    if (!(t_max > t_min)) throw config_error("grid: t_max must exceed t_min");
    if (spacing == Spacing::log && t_min <= 0.0)
        throw config_error("grid: log spacing needs t_min > 0");
    std::vector<double> t(points);
    if (spacing == Spacing::linear) {
        const double d = (t_max - t_min) / (points - 1);
        for (int i = 0; i < points; ++i) t[i] = t_min + d * i;
    } else {
        const double la = std::log(t_min), lb = std::log(t_max);
        const double d = (lb - la) / (points - 1);
        for (int i = 0; i < points; ++i) t[i] = std::exp(la + d * i);
    }
    t.back() = t_max;
    return t;
}

std::vector<double> TimeGrid::integer_steps(int t_max) {
    if (t_max < 1) throw config_error("grid: t_max must be >= 1");
    std::vector<double> t(t_max + 1);
    for (int i = 0; i <= t_max; ++i) t[i] = i;
    return t;
}

namespace {

void check_weights(const std::vector<double>& w, std::size_t dim) {
    if (w.size() != dim) throw config_error("weights/spectrum size mismatch");
    double total = 0.0;
    for (double v : w) {
        if (v < 0.0) throw config_error("weights must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw config_error("weights must be normalized");
}

}  // namespace

SffCurve exact_sff(const Spectrum& spec, const std::vector<double>& weights,
                   const std::vector<double>& times) {
    check_weights(weights, spec.eigenvalues.size());
    SffCurve c;
    c.times = times;
    c.k.resize(times.size());
    c.stderr_k.assign(times.size(), 0.0);
    for (std::size_t j = 0; j < times.size(); ++j) {
        double re = 0.0, im = 0.0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            const double ph = spec.eigenvalues[l] * times[j];
            re += weights[l] * std::cos(ph);
            im -= weights[l] * std::sin(ph);
        }
        c.k[j] = re * re + im * im;
    }
    return c;
}

SffCurve exact_sff_floquet(const Spectrum& quasi, const std::vector<double>& weights,
                           int t_max) {
    if (quasi.kind != Spectrum::Kind::floquet)
        throw config_error("exact_sff_floquet: needs a floquet spectrum");
    check_weights(weights, quasi.eigenvalues.size());
    const std::size_t d = weights.size();
    SffCurve c;
    c.times = TimeGrid::integer_steps(t_max);
    c.k.resize(t_max + 1);
    c.stderr_k.assign(t_max + 1, 0.0);
    // z_l(t+1) = z_l(t) * e^{-i lambda_l theta}
    std::vector<cplx> z(d, cplx{1.0, 0.0}), step(d);
    for (std::size_t l = 0; l < d; ++l)
        step[l] = std::polar(1.0, -quasi.eigenvalues[l] * quasi.period);
    for (int t = 0; t <= t_max; ++t) {
        cplx amp{0.0, 0.0};
        for (std::size_t l = 0; l < d; ++l) amp += weights[l] * z[l];
        c.k[t] = std::norm(amp);
        for (std::size_t l = 0; l < d; ++l) z[l] *= step[l];
    }
    return c;
}

double k_infinity(const std::vector<double>& weights) {
    double s = 0.0;
    for (double v : weights) s += v * v;
    return s;
}

RmtEnsemble parse_ensemble(const std::string& s) {
    if (s == "goe") return RmtEnsemble::goe;
    if (s == "gue") return RmtEnsemble::gue;
    if (s == "coe") return RmtEnsemble::coe;
    if (s == "cue") return RmtEnsemble::cue;
    throw config_error("unknown ensemble '" + s + "' (goe|gue|coe|cue)");
}

std::string ensemble_name(RmtEnsemble e) {
    switch (e) {
        case RmtEnsemble::goe: return "goe";
        case RmtEnsemble::gue: return "gue";
        case RmtEnsemble::coe: return "coe";
        case RmtEnsemble::cue: return "cue";
    }
    return "?";
}

namespace {

double goe_shape(double x, double tau, double tau_h) {
    // x = tau/tau_h
    if (x <= 0.0) return 0.0;
    if (x <= 1.0) return 2.0 * x - x * std::log1p(2.0 * x);
    return 2.0 - x * std::log((2.0 * tau + tau_h) / (2.0 * tau - tau_h));
}

}  // namespace

double rmt_value(RmtEnsemble e, const RmtParams& p, double t) {
    double tau_h = p.tau_h, k_inf = p.k_inf;
    if (e == RmtEnsemble::coe || e == RmtEnsemble::cue) {
        if (p.dim < 2) throw config_error("rmt: circular ensembles need dim >= 2");
        tau_h = static_cast<double>(p.dim);
        k_inf = 1.0 / p.dim;
    } else {
        if (!(p.tau_h > 0.0)) throw config_error("rmt: tau_h must be > 0");
        if (!(p.k_inf > 0.0 && p.k_inf <= 1.0)) throw config_error("rmt: k_inf in (0, 1]");
    }
    const double x = t / tau_h;
    switch (e) {
        case RmtEnsemble::goe:
        case RmtEnsemble::coe:
            return k_inf * goe_shape(x, t, tau_h);
        case RmtEnsemble::gue:
        case RmtEnsemble::cue:
            return k_inf * std::min(x, 1.0);
    }
    return 0.0;
}

SffCurve rmt_baseline(RmtEnsemble e, const RmtParams& p,
                      const std::vector<double>& times) {
    SffCurve c;
    c.times = times;
    c.k.resize(times.size());
    c.stderr_k.assign(times.size(), 0.0);
    c.meta.filter = "rmt:" + ensemble_name(e);
    for (std::size_t i = 0; i < times.size(); ++i) c.k[i] = rmt_value(e, p, times[i]);
    return c;
}

std::optional<double> thouless_time(const SffCurve& curve, const SffCurve& baseline,
                                    double epsilon, int sustain) {
    if (curve.times.size() != baseline.times.size())
        throw config_error("thouless_time: incompatible grids");
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        if (std::abs(curve.times[i] - baseline.times[i]) > 1e-12 * std::max(1.0, curve.times[i]))
            throw config_error("thouless_time: incompatible grids");
    if (epsilon <= 0.0) throw config_error("thouless_time: epsilon must be > 0");
    if (sustain < 1) throw config_error("thouless_time: sustain must be >= 1");

    int run = 0;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const bool ok = baseline.k[i] > 0.0 &&
                        std::abs(curve.k[i] / baseline.k[i] - 1.0) < epsilon;
        run = ok ? run + 1 : 0;
        if (run >= sustain) return curve.times[i + 1 - sustain];
    }
    return std::nullopt;
}

CurveAccumulator::CurveAccumulator(std::vector<double> times)
    : times_(std::move(times)),
      mean_(times_.size(), 0.0),
      m2_(times_.size(), 0.0) {}

void CurveAccumulator::add(const std::vector<double>& k_values) {
    if (k_values.size() != times_.size())
        throw config_error("CurveAccumulator: size mismatch");
    ++n_;
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        const double d = k_values[i] - mean_[i];
        mean_[i] += d / n_;
        m2_[i] += d * (k_values[i] - mean_[i]);
    }
}

SffCurve CurveAccumulator::finish(SffCurveMeta meta) const {
    if (n_ == 0) throw numerical_error("CurveAccumulator: no realizations");
    SffCurve c;
    c.times = times_;
    c.k = mean_;
    c.stderr_k.resize(times_.size(), 0.0);
    if (n_ > 1)
        for (std::size_t i = 0; i < m2_.size(); ++i)
            c.stderr_k[i] = std::sqrt(m2_[i] / (static_cast<double>(n_) - 1.0) / n_);
    meta.n_disorder = n_;
    c.meta = std::move(meta);
    return c;
}

}  // namespace sfflab
