#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sfflab/errors.hpp"
#include "sfflab/models.hpp"
#include "sfflab/rng.hpp"
#include "sfflab/spectra.hpp"

using namespace sfflab;

namespace {

HermitianOperator diag_op(const std::vector<double>& d) {
    HermitianOperator h;
    h.dim = static_cast<int>(d.size());
    h.matrix = CMat(h.dim);
    for (int i = 0; i < h.dim; ++i) h.matrix.at(i, i) = d[i];
    return h;
}

HermitianOperator random_hermitian(int n, std::uint64_t seed) {
    Rng rng(seed);
    HermitianOperator h;
    h.dim = n;
    h.matrix = CMat(n);
    for (int i = 0; i < n; ++i) {
        h.matrix.at(i, i) = rng.normal();
        for (int j = i + 1; j < n; ++j) {
            const cplx v{rng.normal(), rng.normal()};
            h.matrix.at(i, j) = v;
            h.matrix.at(j, i) = std::conj(v);
        }
    }
    return h;
}

double reconstruction_residual(const HermitianOperator& h, const Spectrum& s) {
    const CMat& v = *s.eigenvectors;
    CMat scaled = v;
    for (int j = 0; j < v.n; ++j)
        for (int i = 0; i < v.n; ++i) scaled.at(i, j) *= s.eigenvalues[j];
    const CMat back = matmul_bdagger(scaled, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < back.a.size(); ++i)
        worst = std::max(worst, std::abs(back.a[i] - h.matrix.a[i]));
    return worst;
}

}  // namespace

TEST_CASE("eig_hermitian basics") {
    const Spectrum s = eig_hermitian(diag_op({3.0, 1.0, 2.0}), false);
    CHECK(s.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});

    HermitianOperator px;
    px.dim = 2;
    px.matrix = CMat(2);
    px.matrix.at(0, 1) = 1.0;
    px.matrix.at(1, 0) = 1.0;
    const Spectrum sx = eig_hermitian(px, false);
    CHECK(sx.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(sx.eigenvalues[1] == doctest::Approx(1.0));
}

TEST_CASE("reconstruction and eigenvector unitarity") {
    const HermitianOperator h = random_hermitian(24, 8);
    const Spectrum s = eig_hermitian(h, true);
    double norm = 0.0;
    for (double e : s.eigenvalues) norm = std::max(norm, std::abs(e));
    CHECK(reconstruction_residual(h, s) < 1e-8 * norm);
    CHECK(unitarity_residual(*s.eigenvectors) < 1e-9);
}

TEST_CASE("propagator: identity, phases, group property") {
    const HermitianOperator h = diag_op({0.0, 1.0});
    const Spectrum s = eig_hermitian(h, true);

    const UnitaryOperator u0 = propagator(s, 0.0);
    CHECK(std::abs(u0.matrix.at(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(u0.matrix.at(1, 1) - 1.0) < 1e-14);

    const UnitaryOperator upi = propagator(s, std::numbers::pi);
    CHECK(std::abs(upi.matrix.at(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(upi.matrix.at(1, 1) + 1.0) < 1e-12);

    const HermitianOperator hr = random_hermitian(8, 21);
    const Spectrum sr = eig_hermitian(hr, true);
    const UnitaryOperator a = propagator(sr, 0.37);
    const UnitaryOperator b = propagator(sr, 1.21);
    const UnitaryOperator ab = propagator(sr, 0.37 + 1.21);
    const CMat prod = matmul(a.matrix, b.matrix);
    double worst = 0.0;
    for (std::size_t i = 0; i < prod.a.size(); ++i)
        worst = std::max(worst, std::abs(prod.a[i] - ab.matrix.a[i]));
    CHECK(worst < 1e-9);

    Spectrum no_vec = eig_hermitian(hr, false);
    CHECK_THROWS_AS(propagator(no_vec, 1.0), config_error);
}

TEST_CASE("floquet operator ordering and unitarity") {
    // single layer reduces to the propagator
    const HermitianOperator h = random_hermitian(6, 5);
    const Spectrum s = eig_hermitian(h, true);
    const UnitaryOperator direct = propagator(s, 0.8);
    const UnitaryOperator layered = floquet_operator({{&h, 0.8}});
    for (std::size_t i = 0; i < direct.matrix.a.size(); ++i)
        CHECK(std::abs(direct.matrix.a[i] - layered.matrix.a[i]) < 1e-10);

    // commuting diagonal layers: order-independent phase product
    const HermitianOperator d1 = diag_op({0.3, 1.1, -0.4});
    const HermitianOperator d2 = diag_op({-0.9, 0.2, 2.0});
    const UnitaryOperator u12 = floquet_operator({{&d1, 0.5}, {&d2, 1.5}});
    const UnitaryOperator u21 = floquet_operator({{&d2, 1.5}, {&d1, 0.5}});
    for (std::size_t i = 0; i < u12.matrix.a.size(); ++i)
        CHECK(std::abs(u12.matrix.a[i] - u21.matrix.a[i]) < 1e-12);

    // the first listed layer acts last: U = e^{-i t1 H1} e^{-i t2 H2}
    const HermitianOperator a = random_hermitian(6, 51);
    const HermitianOperator b = random_hermitian(6, 52);
    const UnitaryOperator u = floquet_operator({{&a, 0.4}, {&b, 0.7}});
    const CMat want = matmul(propagator(eig_hermitian(a, true), 0.4).matrix,
                             propagator(eig_hermitian(b, true), 0.7).matrix);
    for (std::size_t i = 0; i < want.a.size(); ++i)
        CHECK(std::abs(u.matrix.a[i] - want.a[i]) < 1e-10);

    CHECK(unitarity_residual(u.matrix) < 1e-9);

    const HermitianOperator wrong = random_hermitian(4, 53);
    CHECK_THROWS_AS(floquet_operator({{&a, 0.4}, {&wrong, 0.7}}), config_error);
}

TEST_CASE("quasienergies: folding, branch, two-path trace consistency") {
    UnitaryOperator ident;
    ident.dim = 3;
    ident.matrix = CMat::identity(3);
    const Spectrum s0 = quasienergies(ident, 1.0);
    for (double l : s0.eigenvalues) CHECK(l == 0.0);

    UnitaryOperator d;
    d.dim = 2;
    d.matrix = CMat(2);
    d.matrix.at(0, 0) = std::polar(1.0, -0.3);
    d.matrix.at(1, 1) = std::polar(1.0, -1.7);
    const Spectrum sd = quasienergies(d, 1.0);
    CHECK(sd.eigenvalues[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(sd.eigenvalues[1] == doctest::Approx(1.7).epsilon(1e-12));

    // |tr U^t| from quasienergies equals the direct matrix-power trace
    Rng rng(77);
    std::vector<double> fy(4), fz(4);
    for (double& f : fy) f = rng.uniform(-1.0, 1.0);
    for (double& f : fz) f = rng.uniform(-1.0, 1.0);
    const HermitianOperator hx = build_ising_layer('x', 4, fy);
    const HermitianOperator hy = build_ising_layer('y', 4, fz);
    const UnitaryOperator u = floquet_operator({{&hx, 1.0}, {&hy, 1.0}});
    const Spectrum q = quasienergies(u, 1.0);

    CMat power = CMat::identity(u.dim);
    for (int t = 0; t <= 8; ++t) {
        cplx tr_power = 0.0, tr_quasi = 0.0;
        for (int i = 0; i < u.dim; ++i) tr_power += power.at(i, i);
        for (double l : q.eigenvalues) tr_quasi += std::polar(1.0, -l * 1.0 * t);
        CHECK(std::abs(std::abs(tr_power) - std::abs(tr_quasi)) < 1e-8);
        power = matmul(power, u.matrix);
    }

    // non-unitary input is rejected
    UnitaryOperator bad;
    bad.dim = 2;
    bad.matrix = CMat(2);
    bad.matrix.at(0, 0) = 2.0;
    bad.matrix.at(1, 1) = 1.0;
    CHECK_THROWS_AS(quasienergies(bad, 1.0), numerical_error);
}

TEST_CASE("quasienergy path independence: dense product vs per-layer eigenphases") {
    // for commuting diagonal layers the quasienergies are the folded sums
    const std::vector<double> e1{0.3, 1.1, 2.7}, e2{0.5, -0.2, 1.9};
    const HermitianOperator d1 = diag_op(e1), d2 = diag_op(e2);
    const double tau1 = 0.7, tau2 = 0.9, period = tau1 + tau2;
    const UnitaryOperator u = floquet_operator({{&d1, tau1}, {&d2, tau2}});
    const Spectrum got = quasienergies(u, period);
    std::vector<double> want;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < e1.size(); ++i) {
        double x = std::fmod(e1[i] * tau1 + e2[i] * tau2, two_pi);
        if (x < 0) x += two_pi;
        want.push_back(x / period);
    }
    std::sort(want.begin(), want.end());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got.eigenvalues[i] == doctest::Approx(want[i]).epsilon(1e-8));
}

TEST_CASE("mean level spacing") {
    Spectrum picket;
    picket.kind = Spectrum::Kind::hamiltonian;
    for (int i = 0; i < 30; ++i) picket.eigenvalues.push_back(0.25 * i);
    const LevelSpacing ls = mean_level_spacing(picket);
    CHECK(ls.delta_e == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ls.tau_heisenberg == doctest::Approx(2.0 * std::numbers::pi / 0.25).epsilon(1e-12));

    Spectrum three;
    three.eigenvalues = {0.0, 1.0, 3.0};
    CHECK(mean_level_spacing(three, 1.0).delta_e == doctest::Approx(1.5));

    Spectrum one;
    one.eigenvalues = {1.0};
    CHECK_THROWS_AS(mean_level_spacing(one, 1.0), config_error);
}
