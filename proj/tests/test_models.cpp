#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sfflab/errors.hpp"
#include "sfflab/models.hpp"
#include "sfflab/rng.hpp"
#include "sfflab/spectra.hpp"

using namespace sfflab;

namespace {

SpinModelSpec spec_l(int l, double w = 0.0) {
    SpinModelSpec s;
    s.sites = l;
    s.w = w;
    return s;
}

std::vector<double> eig_of(const HermitianOperator& h) {
    return eig_hermitian(h, false).eigenvalues;
}

// eigenvalues of the oracle-built dense matrix, through the library solver
std::vector<double> eig_of(const oracle::Dense& d) {
    HermitianOperator h;
    h.dim = d.n;
    h.matrix = CMat(d.n);
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) h.matrix.at(i, j) = d.at(i, j);
    return eig_of(h);
}

// every value of `sub` appears in `full` (both sorted)
bool spectrum_subset(const std::vector<double>& sub, const std::vector<double>& full,
                     double tol) {
    std::size_t j = 0;
    for (double e : sub) {
        while (j < full.size() && full[j] < e - tol) ++j;
        if (j == full.size() || std::abs(full[j] - e) > tol) return false;
        ++j;
    }
    return true;
}

}  // namespace

TEST_CASE("disorder sampling: degenerate width, determinism, law") {
    const SpinModelSpec s = spec_l(8, 0.0);
    const DisorderRealization d = sample_disorder(s, DisorderLaw::uniform, 7);
    for (double h : d.fields_z) CHECK(h == 0.0);

    const SpinModelSpec s2 = spec_l(8, 2.0);
    const DisorderRealization a = sample_disorder(s2, DisorderLaw::uniform, 123);
    const DisorderRealization b = sample_disorder(s2, DisorderLaw::uniform, 123);
    CHECK(a.fields_z == b.fields_z);

    // law check by direct sampling: mean within 3 sigma of 0, max within W
    double sum = 0.0, maxabs = 0.0;
    const int n_samples = 100000 / 8;
    for (int i = 0; i < n_samples; ++i) {
        const DisorderRealization r = sample_disorder(s2, DisorderLaw::uniform, 1000 + i);
        for (double h : r.fields_z) {
            sum += h;
            maxabs = std::max(maxabs, std::abs(h));
        }
    }
    const double n = 8.0 * n_samples;
    const double sigma_mean = 2.0 / std::sqrt(3.0) / std::sqrt(n);
    CHECK(std::abs(sum / n) < 3.0 * sigma_mean);
    CHECK(maxabs <= 2.0);
    CHECK(maxabs > 1.9);  // the edge is actually approached

    const DisorderRealization g = sample_disorder(s2, DisorderLaw::normal, 5);
    CHECK(g.fields_x.size() == 8);
    CHECK(g.fields_y.size() == 8);
    for (double h : g.fields_z) CHECK(std::isfinite(h));
}

TEST_CASE("sector basis dimensions and ordering") {
    CHECK(sector_basis(12, 0).dim() == 924);
    CHECK(sector_basis(8, 0).dim() == 70);
    const SectorBasis full_up = sector_basis(4, 4);
    CHECK(full_up.dim() == 1);
    CHECK(full_up.states[0] == 0b1111u);

    const SectorBasis b = sector_basis(8, 0);
    CHECK(std::is_sorted(b.states.begin(), b.states.end()));
    CHECK(b.dim() == static_cast<int>(binomial(8, 4)));

    CHECK_THROWS_AS(sector_basis(8, 1), config_error);   // parity
    CHECK_THROWS_AS(sector_basis(8, 10), config_error);  // out of range
}

TEST_CASE("all-up sector energy is the classical bond sum") {
    // flip-flop annihilates; 4 NN and 4 NNN zz bonds all aligned
    SpinModelSpec s = spec_l(4);
    s.delta = 1.3;
    s.delta2 = 0.25;
    const DisorderRealization d = sample_disorder(s, DisorderLaw::uniform, 1);
    const SectorBasis sector = sector_basis(4, 4);
    const HermitianOperator h = build_heisenberg(s, d, &sector);
    CHECK(h.dim == 1);
    CHECK(h.matrix.at(0, 0).real() ==
          doctest::Approx(4 * s.delta + 4 * s.delta2).epsilon(1e-14));
    CHECK(h.matrix.at(0, 0).imag() == 0.0);
}

TEST_CASE("sector eigenvalues against the full-space kron oracle") {
    SpinModelSpec s = spec_l(4);
    s.delta = 1.0;
    s.j2 = 0.0;
    s.delta2 = 0.0;
    DisorderRealization d = sample_disorder(s, DisorderLaw::uniform, 1);
    const SectorBasis sector = sector_basis(4, 0);
    const auto sub = eig_of(build_heisenberg(s, d, &sector));
    const auto full = eig_of(oracle::heisenberg_full(4, 1.0, 0.0, 0.0, d.fields_z));
    CHECK(spectrum_subset(sub, full, 1e-9));
}

TEST_CASE("sector consistency for L = 6, 8 with disorder and NNN terms") {
    for (int l : {6, 8}) {
        SpinModelSpec s = spec_l(l, 2.0);
        const DisorderRealization d = sample_disorder(s, DisorderLaw::uniform, 17 + l);
        const SectorBasis sector = sector_basis(l, 0);
        const auto sub = eig_of(build_heisenberg(s, d, &sector));
        const auto full =
            eig_of(oracle::heisenberg_full(l, s.delta, s.j2, s.delta2, d.fields_z));
        CHECK(spectrum_subset(sub, full, 1e-9));
        // full space also matches the library's own full-space build
        const auto lib_full = eig_of(build_heisenberg(s, d, nullptr));
        REQUIRE(lib_full.size() == full.size());
        for (std::size_t i = 0; i < full.size(); ++i)
            CHECK(lib_full[i] == doctest::Approx(full[i]).epsilon(1e-10));
    }
}

TEST_CASE("phased flip-flop model: hermitian, real spectrum, global-phase invariance") {
    SpinModelSpec s = spec_l(6, 1.0);
    const DisorderRealization d = sample_disorder(s, DisorderLaw::uniform, 3);
    const SectorBasis sector = sector_basis(6, 0);

    std::vector<double> constant_phase(6, 0.77);
    const auto plain = eig_of(build_heisenberg(s, d, &sector));
    const auto shifted = eig_of(build_heisenberg(s, d, &sector, &constant_phase));
    for (std::size_t i = 0; i < plain.size(); ++i)
        CHECK(shifted[i] == doctest::Approx(plain[i]).epsilon(1e-12));

    Rng rng(99);
    std::vector<double> random_phase(6);
    for (double& p : random_phase) p = rng.uniform(0.0, 6.283);
    const HermitianOperator h = build_heisenberg(s, d, &sector, &random_phase);
    CHECK(hermiticity_residual(h.matrix) < 1e-12);
    for (double e : eig_of(h)) CHECK(std::isfinite(e));
}

TEST_CASE("ising layer: boundary rule, classical diagonal, tracelessness") {
    std::vector<double> zero(4, 0.0);
    CHECK_THROWS_AS(build_ising_layer('z', 2, std::vector<double>(2, 0.0)), config_error);

    const HermitianOperator hz = build_ising_layer('z', 4, zero);
    for (int i = 0; i < hz.dim; ++i)
        for (int j = 0; j < hz.dim; ++j)
            if (i != j) CHECK(std::abs(hz.matrix.at(i, j)) == 0.0);
    // entries count aligned minus misaligned NN pairs
    CHECK(hz.matrix.at(0b0000, 0b0000).real() == doctest::Approx(4.0));
    CHECK(hz.matrix.at(0b0101, 0b0101).real() == doctest::Approx(-4.0));
    CHECK(hz.matrix.at(0b0011, 0b0011).real() == doctest::Approx(0.0));

    Rng rng(4);
    std::vector<double> fields(4);
    for (double& f : fields) f = rng.uniform(-1.0, 1.0);
    const HermitianOperator hx = build_ising_layer('x', 4, fields);
    CHECK(hermiticity_residual(hx.matrix) < 1e-12);
    cplx trace = 0.0;
    for (int i = 0; i < hx.dim; ++i) trace += hx.matrix.at(i, i);
    CHECK(std::abs(trace) < 1e-12);

    // oracle comparison: J sum sx sx + h^y sy
    oracle::Dense ref(1 << 4);
    for (int i = 0; i < 4; ++i) {
        oracle::add_scaled(ref, oracle::pauli_string(4, {{i, 'x'}, {(i + 1) % 4, 'x'}}), 1.0);
        oracle::add_scaled(ref, oracle::pauli_string(4, {{i, 'y'}}), fields[i]);
    }
    const auto want = eig_of(ref);
    const auto got = eig_of(hx);
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

TEST_CASE("floquet halves cancel the y field in their mean") {
    SpinModelSpec s = spec_l(4);
    const DisorderRealization d = sample_disorder(s, DisorderLaw::normal, 11);
    const auto [h1, h2] = build_floquet_halves(4, d);
    CHECK(hermiticity_residual(h1.matrix) < 1e-12);
    CHECK(hermiticity_residual(h2.matrix) < 1e-12);

    // mean of the halves against an oracle with no sy term at all
    oracle::Dense ref(1 << 4);
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        for (char ax : {'x', 'y', 'z'})
            oracle::add_scaled(ref, oracle::pauli_string(4, {{i, ax}, {j, ax}}), 1.0);
        oracle::add_scaled(ref, oracle::pauli_string(4, {{i, 'x'}}), d.fields_x[i] / 4.0);
        oracle::add_scaled(ref, oracle::pauli_string(4, {{i, 'z'}}), d.fields_z[i] / 4.0);
    }
    for (int i = 0; i < h1.dim; ++i)
        for (int j = 0; j < h1.dim; ++j) {
            const cplx mean = 0.5 * (h1.matrix.at(i, j) + h2.matrix.at(i, j));
            CHECK(std::abs(mean - ref.at(i, j)) < 1e-12);
        }

    // all fields zero -> both halves are the clean chain
    DisorderRealization clean;
    clean.fields_x.assign(4, 0.0);
    clean.fields_y.assign(4, 0.0);
    clean.fields_z.assign(4, 0.0);
    const auto [c1, c2] = build_floquet_halves(4, clean);
    for (std::size_t i = 0; i < c1.matrix.a.size(); ++i)
        CHECK(c1.matrix.a[i] == c2.matrix.a[i]);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(spec_l(3).validate(), config_error);
    CHECK_THROWS_AS(spec_l(16).validate(), config_error);
    CHECK_THROWS_AS(spec_l(8, -1.0).validate(), config_error);

    // x/y fields are incompatible with a fixed-Sz basis
    SpinModelSpec s = spec_l(4);
    DisorderRealization d = sample_disorder(s, DisorderLaw::normal, 2);
    const SectorBasis sector = sector_basis(4, 0);
    CHECK_THROWS_AS(build_heisenberg(s, d, &sector), config_error);
}
