#include "sfflab/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "sfflab/errors.hpp"

namespace sfflab {

DiagonalEnsemble DiagonalEnsemble::infinite_temperature(int dim) {
    if (dim < 1) throw config_error("ensemble: dim must be >= 1");
    DiagonalEnsemble e;
    e.weights.assign(dim, 1.0 / dim);
    e.total = 1.0;
    return e;
}

DiagonalEnsemble DiagonalEnsemble::normalized() const {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw config_error("ensemble: negative weight");
        sum += w;
    }
    if (!(sum > 0.0)) throw numerical_error("ensemble: zero total weight");
    DiagonalEnsemble e;
    e.weights.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) e.weights[i] = weights[i] / sum;
    e.total = 1.0;
    return e;
}

void DiagonalEnsemble::validate_normalized() const {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw config_error("ensemble: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw config_error("ensemble: weights not normalized");
}

double readout_probability(double energy, double t, double delta, bool plus) {
    if (t < 0.0) throw config_error("readout_probability: t must be >= 0");
    const double c = std::cos(0.5 * (energy - delta) * t);
    const double p_plus = c * c;
    return plus ? p_plus : 1.0 - p_plus;
}

std::vector<double> readout_update(const std::vector<double>& weights,
                                   const std::vector<double>& energies,
                                   double t, double delta, bool plus) {
    if (weights.size() != energies.size())
        throw config_error("readout_update: size mismatch");
    std::vector<double> out(weights.size());
    for (std::size_t l = 0; l < weights.size(); ++l)
        out[l] = weights[l] * readout_probability(energies[l], t, delta, plus);
    return out;
}

void PrepConfig::resolve(const std::vector<double>& energies, double& t0_out,
                         double& delta_out) const {
    if (energies.empty()) throw config_error("prep: empty spectrum");
    if (steps < 0) throw config_error("prep: M must be >= 0");
    const double e_min = energies.front(), e_max = energies.back();
    delta_out = center.value_or(0.5 * (e_min + e_max));
    double xmax = 0.0;
    for (double e : energies) xmax = std::max(xmax, std::abs(e - delta_out));
    if (!(xmax > 0.0)) xmax = 1.0;  // single-level spectrum at delta
    const double t0_cap = std::numbers::pi / xmax;
    t0_out = t0.value_or(0.5 * t0_cap);
    if (t0_out <= 0.0) throw config_error("prep: t0 must be > 0");
    if (t0_out > t0_cap * (1.0 + 1e-12))
        throw config_error("prep: t0 exceeds pi/|E-delta|_max for this spectrum");
}

PrepResult prepare_mc(const Spectrum& spec, int steps, double t0, double delta,
                      const DiagonalEnsemble& rho_in) {
    rho_in.validate_normalized();
    if (rho_in.weights.size() != spec.eigenvalues.size())
        throw config_error("prepare_mc: ensemble/spectrum size mismatch");
    PrepResult r;
    r.rho_mc.weights.resize(rho_in.weights.size());
    double p_mc = 0.0;
    for (std::size_t l = 0; l < rho_in.weights.size(); ++l) {
        const double p =
            pea_filter_value(spec.eigenvalues[l] - delta, steps, t0) * rho_in.weights[l];
        r.rho_mc.weights[l] = p;
        p_mc += p;
    }
    if (!(p_mc > 1e-300))
        throw numerical_error("prepare_mc: filter missed the spectrum (p_mc ~ 0)");
    for (double& w : r.rho_mc.weights) w /= p_mc;
    r.rho_mc.total = 1.0;
    r.p_mc = p_mc;
    return r;
}

std::vector<std::vector<double>> prep_step_probabilities(
    const std::vector<double>& energies, int steps, double t0, double delta) {
    std::vector<std::vector<double>> p(steps, std::vector<double>(energies.size()));
    for (int m = 0; m < steps; ++m) {
        // interaction time 2^{m+1} t0, so the "+" probability is
        // cos^2(2^m t0 (E - delta)); the product over m is the pea filter
        const double t = std::ldexp(t0, m + 1);
        for (std::size_t l = 0; l < energies.size(); ++l)
            p[m][l] = readout_probability(energies[l], t, delta, true);
    }
    return p;
}

std::vector<double> ensemble_cdf(const DiagonalEnsemble& rho) {
    rho.validate_normalized();
    std::vector<double> cdf(rho.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.weights.size(); ++i) {
        acc += rho.weights[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

namespace {

int sample_index(const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                     cdf.size() - 1));
}

}  // namespace

std::optional<int> sample_prep_trajectory(
    const std::vector<std::vector<double>>& step_probs,
    const std::vector<double>& rho_in_cdf, Rng& rng) {
    const int l = sample_index(rho_in_cdf, rng);
    for (const auto& row : step_probs)
        if (!rng.bernoulli(row[l])) return std::nullopt;
    return l;
}

std::pair<double, double> measure_sff_point(const Spectrum& spec,
                                            const DiagonalEnsemble& rho,
                                            double tau, int shots, Rng& rng) {
    if (shots < 1) throw config_error("measure_sff_point: N must be >= 1");
    const std::vector<double> cdf = ensemble_cdf(rho);
    double sx = 0.0, sy = 0.0;
    for (int n = 0; n < shots; ++n) {
        const int l = sample_index(cdf, rng);
        const double p = 0.5 * (1.0 + std::cos(spec.eigenvalues[l] * tau));
        sx += rng.bernoulli(p) ? 1.0 : -1.0;
    }
    for (int n = 0; n < shots; ++n) {
        const int l = sample_index(cdf, rng);
        const double p = 0.5 * (1.0 + std::sin(spec.eigenvalues[l] * tau));
        sy += rng.bernoulli(p) ? 1.0 : -1.0;
    }
    return {sx / shots, sy / shots};
}

std::vector<QuadratureMeans> run_with_recycling(int eigenstate,
                                                const Spectrum& spec,
                                                const std::vector<double>& taus,
                                                int shots, Rng& rng) {
    if (shots < 1) throw config_error("run_with_recycling: N must be >= 1");
    if (eigenstate < 0 || eigenstate >= spec.dim())
        throw config_error("run_with_recycling: eigenstate index out of range");
    const double e = spec.eigenvalues[eigenstate];
    std::vector<QuadratureMeans> out(taus.size());
    for (std::size_t j = 0; j < taus.size(); ++j) {
        const double px = 0.5 * (1.0 + std::cos(e * taus[j]));
        const double py = 0.5 * (1.0 + std::sin(e * taus[j]));
        double sx = 0.0, sy = 0.0;
        for (int n = 0; n < shots; ++n) sx += rng.bernoulli(px) ? 1.0 : -1.0;
        for (int n = 0; n < shots; ++n) sy += rng.bernoulli(py) ? 1.0 : -1.0;
        out[j] = {sx / shots, sy / shots};
    }
    return out;
}

double estimate_k(double mx, double my, int shots) {
    if (shots < 2) throw config_error("estimate_k: N must be >= 2");
    const double n = shots;
    return n / (n - 1.0) * (mx * mx + my * my - 2.0 / n);
}

double variance_model(double k, int shots) {
    if (shots < 2) throw config_error("variance_model: N must be >= 2");
    const double n = shots;
    return 4.0 * k / n + 4.0 / (n * n);
}

double snr(double k, int shots) { return k / std::sqrt(variance_model(k, shots)); }

double k_star_single(int shots) {
    if (shots < 2) throw config_error("k_star: N must be >= 2");
    return 2.0 * (1.0 + std::sqrt(2.0)) / shots;
}

double k_star(int shots, int n_disorder) {
    if (n_disorder < 1) throw config_error("k_star: N_d must be >= 1");
    return k_star_single(shots) / std::sqrt(static_cast<double>(n_disorder));
}

double estimate_heisenberg(double p_mc, int steps, double t0, int dim) {
    if (!(p_mc > 0.0 && p_mc <= 1.0)) throw config_error("estimate_heisenberg: p_mc in (0,1]");
    return std::ldexp(t0, steps + 1) * dim * p_mc;  // 2^{M+1} t0 D p_mc
}

double estimate_plateau(double p_mc, int dim) {
    if (!(p_mc > 0.0 && p_mc <= 1.0)) throw config_error("estimate_plateau: p_mc in (0,1]");
    return (2.0 / 3.0) / (dim * p_mc);
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "heisenberg") return ModelKind::heisenberg;
    if (s == "floquet-heisenberg") return ModelKind::floquet_heisenberg;
    if (s == "kicked-ising-2") return ModelKind::kicked_ising_2;
    if (s == "kicked-ising-3") return ModelKind::kicked_ising_3;
    throw config_error("unknown model kind '" + s + "'");
}

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::heisenberg: return "heisenberg";
        case ModelKind::floquet_heisenberg: return "floquet-heisenberg";
        case ModelKind::kicked_ising_2: return "kicked-ising-2";
        case ModelKind::kicked_ising_3: return "kicked-ising-3";
    }
    return "?";
}

void ShotPlan::validate() const {
    if (shots < 2) throw config_error("plan: N must be >= 2 (estimator needs N-1)");
    if (disorders < 1) throw config_error("plan: n_disorder must be >= 1");
    if (reuse < 1) throw config_error("plan: n_reuse must be >= 1");
}

namespace {

struct PhaseTables {
    // cos/sin of the per-eigenstate phase at every grid point
    std::vector<double> c, s;
    int n_times = 0;

    double cos_at(int l, int j) const { return c[static_cast<std::size_t>(l) * n_times + j]; }
    double sin_at(int l, int j) const { return s[static_cast<std::size_t>(l) * n_times + j]; }
};

PhaseTables hamiltonian_tables(const std::vector<double>& energies,
                               const std::vector<double>& taus) {
    PhaseTables t;
    t.n_times = static_cast<int>(taus.size());
    t.c.resize(energies.size() * taus.size());
    t.s.resize(energies.size() * taus.size());
    for (std::size_t l = 0; l < energies.size(); ++l)
        for (std::size_t j = 0; j < taus.size(); ++j) {
            const double ph = energies[l] * taus[j];
            t.c[l * taus.size() + j] = std::cos(ph);
            t.s[l * taus.size() + j] = std::sin(ph);
        }
    return t;
}

PhaseTables floquet_tables(const Spectrum& quasi, int t_max) {
    PhaseTables t;
    const std::size_t d = quasi.eigenvalues.size();
    t.n_times = t_max + 1;
    t.c.resize(d * (t_max + 1));
    t.s.resize(d * (t_max + 1));
    for (std::size_t l = 0; l < d; ++l) {
        const cplx step = std::polar(1.0, -quasi.eigenvalues[l] * quasi.period);
        cplx z{1.0, 0.0};
        for (int j = 0; j <= t_max; ++j) {
            t.c[l * (t_max + 1) + j] = z.real();
            t.s[l * (t_max + 1) + j] = -z.imag();  // sin(lambda theta t)
            z *= step;
        }
    }
    return t;
}

// tr-amplitude tables for random product-state sampling:
// a_s(t) = sum_l |Q_{sl}|^2 e^{-i lambda_l theta t}
PhaseTables product_state_tables(const Spectrum& quasi, int t_max) {
    if (!quasi.eigenvectors)
        throw config_error("product-state sampling needs the Schur basis");
    const CMat& q = *quasi.eigenvectors;
    const int d = q.n;
    PhaseTables t;
    t.n_times = t_max + 1;
    t.c.assign(static_cast<std::size_t>(d) * (t_max + 1), 0.0);
    t.s.assign(static_cast<std::size_t>(d) * (t_max + 1), 0.0);
    std::vector<cplx> z(d, cplx{1.0, 0.0}), step(d);
    for (int l = 0; l < d; ++l)
        step[l] = std::polar(1.0, -quasi.eigenvalues[l] * quasi.period);
    std::vector<double> w(static_cast<std::size_t>(d) * d);
    for (int s = 0; s < d; ++s)
        for (int l = 0; l < d; ++l)
            w[static_cast<std::size_t>(s) * d + l] = std::norm(q.at(s, l));
    for (int j = 0; j <= t_max; ++j) {
        for (int s = 0; s < d; ++s) {
            cplx amp{0.0, 0.0};
            const double* ws = &w[static_cast<std::size_t>(s) * d];
            for (int l = 0; l < d; ++l) amp += ws[l] * z[l];
            t.c[static_cast<std::size_t>(s) * (t_max + 1) + j] = amp.real();
            t.s[static_cast<std::size_t>(s) * (t_max + 1) + j] = -amp.imag();
        }
        for (int l = 0; l < d; ++l) z[l] *= step[l];
    }
    return t;
}

// Serve grid points to prepared copies round-robin: each copy takes at most
// min(reuse, T) slots, one shot each, never the same point twice.
struct RecyclingScheduler {
    std::vector<long long> remaining;
    long long pending = 0;
    int pointer = 0;
    int serve_max = 1;

    RecyclingScheduler(int n_times, int shots, int reuse)
        : remaining(n_times, shots),
          pending(static_cast<long long>(n_times) * shots),
          serve_max(std::min(reuse, n_times)) {}

    // next grid point for the current copy, or -1 when the copy is done
    int next(std::vector<int>& visited) {
        if (pending == 0 || static_cast<int>(visited.size()) >= serve_max) return -1;
        const int n = static_cast<int>(remaining.size());
        for (int scanned = 0; scanned < n; ++scanned) {
            const int j = pointer;
            pointer = (pointer + 1) % n;
            if (remaining[j] == 0) continue;
            if (std::find(visited.begin(), visited.end(), j) != visited.end())
                return -1;  // only fresh points left would repeat: retire the copy
            visited.push_back(j);
            --remaining[j];
            --pending;
            return j;
        }
        return -1;
    }
};

struct MeasuredQuadrature {
    std::vector<double> means;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    bool budget_exceeded = false;
};

// One quadrature (0 = sigma_x, 1 = sigma_y) of the recycled measurement.
MeasuredQuadrature measure_quadrature(
    const PhaseTables& tab, const std::vector<double>& taus, int quadrature,
    const std::vector<std::vector<double>>& step_probs,
    const std::vector<double>& rho_in_cdf, int shots, int reuse, double t_coh,
    Rng& rng) {
    const int n_times = static_cast<int>(taus.size());
    MeasuredQuadrature out;
    out.means.assign(n_times, 0.0);
    RecyclingScheduler sched(n_times, shots, reuse);
    std::vector<int> visited;
    while (sched.pending > 0) {
        std::optional<int> l;
        do {
            ++out.attempts;
            l = sample_prep_trajectory(step_probs, rho_in_cdf, rng);
        } while (!l);
        ++out.successes;
        visited.clear();
        double tau_sum = 0.0;
        for (int j = sched.next(visited); j >= 0; j = sched.next(visited)) {
            const double c = quadrature == 0 ? tab.cos_at(*l, j) : tab.sin_at(*l, j);
            out.means[j] += rng.bernoulli(0.5 * (1.0 + c)) ? 1.0 : -1.0;
            tau_sum += taus[j];
        }
        if (t_coh > 0.0 && tau_sum > t_coh) out.budget_exceeded = true;
    }
    for (double& m : out.means) m /= shots;
    return out;
}

}  // namespace

RealizationOutcome run_realization(const ExperimentSpec& spec, int index) {
    RealizationOutcome out;
    out.seed = subseed(spec.plan.master_seed, "disorder", index);
    const int n_times = static_cast<int>(spec.times.size());

    Spectrum spectrum;
    std::vector<double> weights;
    std::vector<std::vector<double>> step_probs;
    DiagonalEnsemble rho_in;

    if (spec.kind == ModelKind::heisenberg) {
        const DisorderRealization dis = sample_disorder(spec.model, spec.law, out.seed);
        const SectorBasis sector = sector_basis(spec.model.sites, 0);
        const HermitianOperator h = build_heisenberg(spec.model, dis, &sector);
        spectrum = eig_hermitian(h, false);
        const int dim = spectrum.dim();

        spec.prep.resolve(spectrum.eigenvalues, out.t0, out.delta);
        const FilterSpec f = FilterSpec::pea(spec.prep.steps, out.t0, out.delta);
        weights = filter_values(f, spectrum.eigenvalues);

        rho_in = DiagonalEnsemble::infinite_temperature(dim);
        const PrepResult prep =
            prepare_mc(spectrum, spec.prep.steps, out.t0, out.delta, rho_in);
        out.p_mc = prep.p_mc;
        out.tau_h_estimate = estimate_heisenberg(prep.p_mc, spec.prep.steps, out.t0, dim);
        out.k_inf_estimate = estimate_plateau(prep.p_mc, dim);
        out.tau_h_spectral = mean_level_spacing(spectrum).tau_heisenberg;
        out.k_inf_filter = k_infinity(weights);
        step_probs = prep_step_probabilities(spectrum.eigenvalues, spec.prep.steps,
                                             out.t0, out.delta);
        if (spec.exact_filter == ExactFilter::gaussian_sixth) {
            const double width =
                (spectrum.eigenvalues.back() - spectrum.eigenvalues.front()) / 6.0;
            const auto g = filter_values(FilterSpec::gaussian(out.delta, width),
                                         spectrum.eigenvalues);
            out.k_exact = exact_sff(spectrum, g, spec.times).k;
        } else {
            out.k_exact = exact_sff(spectrum, weights, spec.times).k;
        }
    } else {
        Rng field_rng(out.seed);
        const int L = spec.model.sites;
        UnitaryOperator u;
        if (spec.kind == ModelKind::floquet_heisenberg) {
            DisorderRealization dis;
            dis.seed = out.seed;
            dis.fields_x.resize(L);
            dis.fields_y.resize(L);
            dis.fields_z.resize(L);
            for (double& h : dis.fields_x) h = field_rng.normal();
            for (double& h : dis.fields_y) h = field_rng.normal();
            for (double& h : dis.fields_z) h = field_rng.normal();
            const auto [h1, h2] = build_floquet_halves(L, dis);
            u = floquet_operator({{&h1, spec.theta / 2.0}, {&h2, spec.theta / 2.0}});
        } else {
            // kicked Ising fields: uniform on [-1, 1]
            std::vector<double> hx(L), hy(L), hz(L);
            for (double& h : hx) h = field_rng.uniform(-1.0, 1.0);
            for (double& h : hy) h = field_rng.uniform(-1.0, 1.0);
            for (double& h : hz) h = field_rng.uniform(-1.0, 1.0);
            const HermitianOperator lx = build_ising_layer('x', L, hy);
            const HermitianOperator ly = build_ising_layer('y', L, hz);
            const HermitianOperator lz = build_ising_layer('z', L, hx);
            if (spec.kind == ModelKind::kicked_ising_2)
                u = floquet_operator({{&lx, spec.theta}, {&ly, spec.theta}});
            else
                u = floquet_operator({{&lx, spec.theta}, {&ly, spec.theta}, {&lz, spec.theta}});
        }
        const bool want_vectors = spec.sampling == FloquetSampling::product_state;
        spectrum = quasienergies(u, spec.theta, want_vectors);
        const int dim = spectrum.dim();
        rho_in = DiagonalEnsemble::infinite_temperature(dim);
        weights = rho_in.weights;
        out.p_mc = 1.0;
        out.k_inf_filter = k_infinity(weights);
        out.k_exact = exact_sff_floquet(spectrum, weights, n_times - 1).k;
    }

    if (!spec.measure) return out;

    const int t_max = n_times - 1;
    PhaseTables tab;
    if (spec.kind == ModelKind::heisenberg)
        tab = hamiltonian_tables(spectrum.eigenvalues, spec.times);
    else if (spec.sampling == FloquetSampling::product_state)
        tab = product_state_tables(spectrum, t_max);
    else
        tab = floquet_tables(spectrum, t_max);

    // Floquet runs skip preparation (rho_in = rho_inf): step_probs stays
    // empty, every attempt succeeds, and each shot samples a fresh copy —
    // either an eigenstate or a random product state, both uniform over dim.
    const std::vector<double> cdf = ensemble_cdf(rho_in);

    out.mx.assign(n_times, 0.0);
    out.my.assign(n_times, 0.0);
    out.k_measured.assign(n_times, 0.0);
    for (int q = 0; q < 2; ++q) {
        Rng rng(subseed(spec.plan.master_seed, "shots", index, q));
        const MeasuredQuadrature mq =
            measure_quadrature(tab, spec.times, q, step_probs, cdf, spec.plan.shots,
                               spec.is_floquet() ? 1 : spec.plan.reuse,
                               spec.t_coh, rng);
        (q == 0 ? out.mx : out.my) = mq.means;
        out.prep_attempts += mq.attempts;
        out.prep_successes += mq.successes;
        out.coherence_budget_exceeded |= mq.budget_exceeded;
    }
    for (int j = 0; j < n_times; ++j)
        out.k_measured[j] = estimate_k(out.mx[j], out.my[j], spec.plan.shots);
    return out;
}

std::vector<MeasurementRecord> measurement_records(const RealizationOutcome& r,
                                                   const std::vector<double>& times,
                                                   int shots) {
    if (r.failed || r.k_measured.size() != times.size())
        throw config_error("measurement_records: realization carries no measurement");
    std::vector<MeasurementRecord> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        out[j].tau = times[j];
        out[j].mx = r.mx[j];
        out[j].my = r.my[j];
        out[j].k_hat = r.k_measured[j];
        out[j].modeled_variance = variance_model(std::max(r.k_measured[j], 0.0), shots);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers,
                                const std::atomic<bool>* cancel) {
    spec.plan.validate();
    if (spec.times.size() < 2) throw config_error("experiment: need at least 2 grid points");
    if (spec.is_floquet())
        for (std::size_t j = 0; j < spec.times.size(); ++j)
            if (spec.times[j] != static_cast<double>(j))
                throw config_error("experiment: floquet grids are integer steps 0..t_max");
    const int n_d = spec.plan.disorders;

    std::vector<RealizationOutcome> slots(n_d);
    std::vector<char> done(n_d, 0);
    std::atomic<int> next{0};

    int n_workers = workers > 0 ? workers
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::clamp(n_workers, 1, n_d);

    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_d) return;
            if (cancel && cancel->load()) return;
            try {
                slots[i] = run_realization(spec, i);
            } catch (const std::exception& e) {
                slots[i].seed = subseed(spec.plan.master_seed, "disorder", i);
                slots[i].failed = true;
                slots[i].error = e.what();
            }
            done[i] = 1;
        }
    };
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // aggregate in realization order so worker count never changes a number
    ExperimentResult res;
    CurveAccumulator exact_acc(spec.times), measured_acc(spec.times);
    double sum_pmc = 0.0, sum_tau = 0.0, sum_kinf = 0.0, sum_tau_sp = 0.0, sum_kf = 0.0;
    std::uint64_t total_attempts = 0;
    int n_ok = 0;
    for (int i = 0; i < n_d; ++i) {
        if (!done[i]) {
            res.complete = false;
            continue;
        }
        res.realizations.push_back(slots[i]);
        if (slots[i].failed) {
            ++res.n_failed;
            continue;
        }
        exact_acc.add(slots[i].k_exact);
        if (spec.measure) measured_acc.add(slots[i].k_measured);
        sum_pmc += slots[i].p_mc;
        sum_tau += slots[i].tau_h_estimate;
        sum_kinf += slots[i].k_inf_estimate;
        sum_tau_sp += slots[i].tau_h_spectral;
        sum_kf += slots[i].k_inf_filter;
        total_attempts += slots[i].prep_attempts;
        ++n_ok;
    }
    if (n_ok == 0) throw numerical_error("experiment: every realization failed");

    res.dim = spec.kind == ModelKind::heisenberg
                  ? sector_basis(spec.model.sites, 0).dim()
                  : (1 << spec.model.sites);
    res.mean_p_mc = sum_pmc / n_ok;
    res.mean_tau_h_estimate = sum_tau / n_ok;
    res.mean_k_inf_estimate = sum_kinf / n_ok;
    res.mean_tau_h_spectral = sum_tau_sp / n_ok;
    res.mean_k_inf_filter = sum_kf / n_ok;
    res.k_star_threshold = k_star(spec.plan.shots, n_ok);
    res.n_run_per_point_formula =
        static_cast<double>(n_ok) * spec.plan.shots /
        (std::max(res.mean_p_mc, 1e-300) * spec.plan.reuse);
    res.n_run_per_point_actual =
        static_cast<double>(total_attempts) / static_cast<double>(spec.times.size());

    SffCurveMeta meta;
    meta.n_shots = 0;
    meta.n_reuse = spec.plan.reuse;
    meta.filter = spec.kind == ModelKind::heisenberg
                      ? "pea(M=" + std::to_string(spec.prep.steps) + ",t0=auto)"
                      : "flat";
    {
        char tag[160];
        std::snprintf(tag, sizeof tag, "%s:L%d:d%.9g:j2%.9g:d2%.9g:w%.9g:t%.9g",
                      model_kind_name(spec.kind).c_str(), spec.model.sites,
                      spec.model.delta, spec.model.j2, spec.model.delta2,
                      spec.model.w, spec.theta);
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(tag)));
        meta.model_hash = hex;
    }
    res.exact = exact_acc.finish(meta);
    if (spec.measure) {
        meta.n_shots = spec.plan.shots;
        res.measured = measured_acc.finish(meta);
    }
    return res;
}

}  // namespace sfflab
