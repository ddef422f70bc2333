#include "sfflab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfflab/errors.hpp"

namespace sfflab {

Spectrum eig_hermitian(const HermitianOperator& h, bool want_vectors) {
    Spectrum s;
    s.kind = Spectrum::Kind::hamiltonian;
    CMat work = h.matrix;
    eigh_inplace(work, s.eigenvalues, want_vectors);
    if (want_vectors) s.eigenvectors = std::move(work);
    return s;
}

UnitaryOperator propagator(const Spectrum& spec, double t) {
    if (!spec.eigenvectors)
        throw config_error("propagator: spectrum carries no eigenvectors");
    const CMat& v = *spec.eigenvectors;
    const int n = v.n;
    CMat scaled = v;  // columns scaled by the eigenphases
    for (int j = 0; j < n; ++j) {
        const cplx ph = std::polar(1.0, -spec.eigenvalues[j] * t);
        for (int i = 0; i < n; ++i) scaled.at(i, j) *= ph;
    }
    UnitaryOperator u;
    u.dim = n;
    u.matrix = matmul_bdagger(scaled, v);
    if (unitarity_residual(u.matrix) >= 1e-9)
        throw numerical_error("propagator: unitarity residual out of tolerance");
    return u;
}

UnitaryOperator floquet_operator(
    const std::vector<std::pair<const HermitianOperator*, double>>& layers) {
    if (layers.empty()) throw config_error("floquet_operator: no layers");
    const int n = layers.front().first->dim;
    UnitaryOperator u;
    u.dim = n;
    u.matrix = CMat::identity(n);
    for (const auto& [h, tau] : layers) {
        if (h->dim != n) throw config_error("floquet_operator: layer dimension mismatch");
        if (tau <= 0.0) throw config_error("floquet_operator: layer durations must be > 0");
        const Spectrum s = eig_hermitian(*h, true);
        u.matrix = matmul(u.matrix, propagator(s, tau).matrix);
    }
    if (unitarity_residual(u.matrix) >= 1e-9)
        throw numerical_error("floquet_operator: unitarity residual out of tolerance");
    return u;
}

Spectrum quasienergies(const UnitaryOperator& u, double period, bool want_vectors) {
    if (period <= 0.0) throw config_error("quasienergies: period must be > 0");
    if (unitarity_residual(u.matrix) >= 1e-9)
        throw numerical_error("quasienergies: input is not unitary within tolerance");

    std::vector<cplx> mu;
    CMat q;
    schur_unitary(u.matrix, mu, want_vectors ? &q : nullptr);

    const int n = u.dim;
    std::vector<int> order(n);
    std::vector<double> lam(n);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
        double x = -std::arg(mu[i]);  // in [-pi, pi)
        if (x < 0.0) x += two_pi;
        if (x >= two_pi) x = 0.0;  // branch-cut ties fold to 0
        lam[i] = x / period;
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return lam[a] < lam[b]; });

    Spectrum s;
    s.kind = Spectrum::Kind::floquet;
    s.period = period;
    s.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) s.eigenvalues[i] = lam[order[i]];
    if (want_vectors) {
        CMat sorted(n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) sorted.at(i, j) = q.at(i, order[j]);
        s.eigenvectors = std::move(sorted);
    }
    return s;
}

LevelSpacing mean_level_spacing(const Spectrum& spec, double window_fraction) {
    if (window_fraction <= 0.0 || window_fraction > 1.0)
        throw config_error("mean_level_spacing: window_fraction in (0, 1]");
    const int n = spec.dim();
    const int lo = static_cast<int>(std::floor(n * (1.0 - window_fraction) / 2.0));
    const int hi = n - lo;
    if (hi - lo < 2)
        throw config_error("mean_level_spacing: too few levels in window");
    // mean of consecutive gaps telescopes
    const double de = (spec.eigenvalues[hi - 1] - spec.eigenvalues[lo]) /
                      static_cast<double>(hi - 1 - lo);
    if (de <= 0.0)
        throw numerical_error("mean_level_spacing: degenerate window");
    return {de, 2.0 * std::numbers::pi / de};
}

}  // namespace sfflab
