#include "sfflab/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sfflab/errors.hpp"
#include "sfflab/rng.hpp"

namespace sfflab {

void SpinModelSpec::validate() const {
    if (sites < 4 || sites > 14 || sites % 2 != 0)
        throw config_error("model: L must be even and in [4, 14], got " + std::to_string(sites));
    if (w < 0.0) throw config_error("model: disorder strength W must be >= 0");
}

DisorderLaw parse_disorder_law(const std::string& s) {
    if (s == "uniform") return DisorderLaw::uniform;
    if (s == "normal") return DisorderLaw::normal;
    throw config_error("unknown disorder law '" + s + "' (uniform|normal)");
}

DisorderRealization sample_disorder(const SpinModelSpec& spec, DisorderLaw law,
                                    std::uint64_t seed) {
    spec.validate();
    DisorderRealization d;
    d.seed = seed;
    Rng rng(seed);
    const int L = spec.sites;
    d.fields_z.resize(L);
    if (law == DisorderLaw::uniform) {
        for (double& h : d.fields_z) h = rng.uniform(-spec.w, spec.w);
    } else {
        // normal law: unit-variance fields on all three axes (Floquet models)
        d.fields_x.resize(L);
        d.fields_y.resize(L);
        for (double& h : d.fields_x) h = rng.normal();
        for (double& h : d.fields_y) h = rng.normal();
        for (double& h : d.fields_z) h = rng.normal();
    }
    return d;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

SectorBasis sector_basis(int sites, int sz) {
    if (sites % 2 != 0 || sites < 2)
        throw config_error("sector_basis: L must be even and >= 2");
    if (std::abs(sz) > sites || (sites + sz) % 2 != 0)
        throw config_error("sector_basis: need |Sz| <= L with L+Sz even");
    const int ups = (sites + sz) / 2;
    SectorBasis b;
    b.sites = sites;
    b.sz = sz;
    b.states.reserve(binomial(sites, ups));
    for (std::uint32_t s = 0; s < (1u << sites); ++s)
        if (std::popcount(s) == ups) b.states.push_back(s);
    return b;
}

namespace {

int sector_index(const SectorBasis& b, std::uint32_t state) {
    const auto it = std::lower_bound(b.states.begin(), b.states.end(), state);
    return static_cast<int>(it - b.states.begin());
}

void check_hermitian(const HermitianOperator& op, const char* what) {
    if (hermiticity_residual(op.matrix) >= 1e-12)
        throw numerical_error(std::string(what) + ": hermiticity residual out of tolerance");
}

}  // namespace

HermitianOperator build_xxz(int sites, const std::vector<double>& jxy,
                            const std::vector<double>& jz,
                            std::span<const double> fields_z,
                            const SectorBasis* sector,
                            const std::vector<double>* phases) {
    const int L = sites;
    if (L < 4) throw config_error("build_xxz: L < 4 double-counts periodic bonds");
    if (jxy.size() != static_cast<std::size_t>(L) * L || jz.size() != jxy.size())
        throw config_error("build_xxz: coupling tables must be L x L");
    if (static_cast<int>(fields_z.size()) != L)
        throw config_error("build_xxz: fields_z must have length L");
    if (sector && sector->sites != L)
        throw config_error("build_xxz: sector basis is for a different L");
    if (phases && static_cast<int>(phases->size()) != L)
        throw config_error("build_xxz: phases must have length L");

    HermitianOperator op;
    std::vector<std::uint32_t> local_states;
    const std::vector<std::uint32_t>* states;
    if (sector) {
        states = &sector->states;
        op.basis = "sector:" + std::to_string(L) + ":" + std::to_string(sector->sz);
    } else {
        local_states.resize(1u << L);
        for (std::uint32_t s = 0; s < local_states.size(); ++s) local_states[s] = s;
        states = &local_states;
        op.basis = "full:" + std::to_string(L);
    }
    const int dim = static_cast<int>(states->size());
    op.dim = dim;
    op.matrix = CMat(dim);

    auto j_at = [&](const std::vector<double>& t, int i, int j) {
        return t[static_cast<std::size_t>(i) * L + j];
    };

    for (int k = 0; k < dim; ++k) {
        const std::uint32_t s = (*states)[k];
        double diag = 0.0;
        for (int i = 0; i < L; ++i) {
            const int zi = (s >> i) & 1 ? 1 : -1;
            diag += fields_z[i] * zi;
            for (int j = i + 1; j < L; ++j) {
                const int zj = (s >> j) & 1 ? 1 : -1;
                diag += j_at(jz, i, j) * zi * zj;
                const double axy = j_at(jxy, i, j);
                if (axy != 0.0 && (((s >> i) & 1) != ((s >> j) & 1))) {
                    const std::uint32_t s2 = s ^ (1u << i) ^ (1u << j);
                    if (s2 > s) {
                        // sx sx + sy sy = 2 (s+ s- + s- s+); the raised site
                        // carries +phi, the lowered one -phi
                        const int up_site = ((s2 >> i) & 1) ? i : j;
                        const int dn_site = up_site == i ? j : i;
                        cplx amp = 2.0 * axy;
                        if (phases)
                            amp *= std::polar(1.0, (*phases)[up_site] - (*phases)[dn_site]);
                        const int k2 = sector ? sector_index(*sector, s2)
                                              : static_cast<int>(s2);
                        op.matrix.at(k2, k) += amp;
                        op.matrix.at(k, k2) += std::conj(amp);
                    }
                }
            }
        }
        op.matrix.at(k, k) += diag;
    }
    check_hermitian(op, "build_xxz");
    return op;
}

HermitianOperator build_heisenberg(const SpinModelSpec& spec,
                                   const DisorderRealization& dis,
                                   const SectorBasis* sector,
                                   const std::vector<double>* phases) {
    spec.validate();
    const int L = spec.sites;
    if (static_cast<int>(dis.fields_z.size()) != L)
        throw config_error("build_heisenberg: fields_z length != L");
    if (sector && (!dis.fields_x.empty() || !dis.fields_y.empty()))
        throw config_error("build_heisenberg: x/y fields break Sz conservation; no sector basis");

    std::vector<double> jxy(static_cast<std::size_t>(L) * L, 0.0);
    std::vector<double> jz(jxy.size(), 0.0);
    auto set_pair = [&](int i, int j, double vxy, double vz) {
        jxy[static_cast<std::size_t>(i) * L + j] += vxy;
        jxy[static_cast<std::size_t>(j) * L + i] += vxy;
        jz[static_cast<std::size_t>(i) * L + j] += vz;
        jz[static_cast<std::size_t>(j) * L + i] += vz;
    };
    for (int i = 0; i < L; ++i) {
        set_pair(i, (i + 1) % L, 1.0, spec.delta);
        set_pair(i, (i + 2) % L, spec.j2, spec.delta2);
    }
    return build_xxz(L, jxy, jz, dis.fields_z, sector, phases);
}

HermitianOperator build_ising_layer(char axis, int sites,
                                    std::span<const double> fields) {
    const int L = sites;
    if (L < 4) throw config_error("build_ising_layer: L < 4 double-counts periodic bonds");
    if (static_cast<int>(fields.size()) != L)
        throw config_error("build_ising_layer: fields length != L");
    if (axis != 'x' && axis != 'y' && axis != 'z')
        throw config_error("build_ising_layer: axis must be x, y or z");
    const char field_axis = axis == 'x' ? 'y' : axis == 'y' ? 'z' : 'x';

    const int dim = 1 << L;
    HermitianOperator op;
    op.dim = dim;
    op.basis = "full:" + std::to_string(L);
    op.matrix = CMat(dim);
    CMat& m = op.matrix;

    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s) {
        for (int i = 0; i < L; ++i) {
            const int j = (i + 1) % L;
            const bool bi = (s >> i) & 1, bj = (s >> j) & 1;
            switch (axis) {
                case 'z':
                    m.at(s, s) += (bi == bj) ? 1.0 : -1.0;
                    break;
                case 'x':
                    m.at(s ^ (1u << i) ^ (1u << j), s) += 1.0;
                    break;
                case 'y':
                    // sy sy flips both bits with amplitude -(-1)^{bi+bj}
                    m.at(s ^ (1u << i) ^ (1u << j), s) += (bi == bj) ? -1.0 : 1.0;
                    break;
            }
            // transverse field on site i
            const double h = fields[i];
            switch (field_axis) {
                case 'z':
                    m.at(s, s) += h * (bi ? 1.0 : -1.0);
                    break;
                case 'x':
                    m.at(s ^ (1u << i), s) += h;
                    break;
                case 'y':
                    m.at(s ^ (1u << i), s) += bi ? cplx{0.0, -h} : cplx{0.0, h};
                    break;
            }
        }
    }
    check_hermitian(op, "build_ising_layer");
    return op;
}

namespace {

// full-space builder with independent x/y/z single-site fields
HermitianOperator heisenberg_with_fields(int L, std::span<const double> hx,
                                         std::span<const double> hy,
                                         std::span<const double> hz) {
    const int dim = 1 << L;
    HermitianOperator op;
    op.dim = dim;
    op.basis = "full:" + std::to_string(L);
    op.matrix = CMat(dim);
    CMat& m = op.matrix;
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s) {
        for (int i = 0; i < L; ++i) {
            const int j = (i + 1) % L;
            const bool bi = (s >> i) & 1, bj = (s >> j) & 1;
            m.at(s, s) += (bi == bj) ? 1.0 : -1.0;               // sz sz
            if (bi != bj) m.at(s ^ (1u << i) ^ (1u << j), s) += 2.0;  // sx sx + sy sy
            m.at(s, s) += hz[i] * (bi ? 1.0 : -1.0);
            if (hx[i] != 0.0) m.at(s ^ (1u << i), s) += hx[i];
            if (hy[i] != 0.0)
                m.at(s ^ (1u << i), s) += bi ? cplx{0.0, -hy[i]} : cplx{0.0, hy[i]};
        }
    }
    check_hermitian(op, "build_floquet_halves");
    return op;
}

}  // namespace

std::pair<HermitianOperator, HermitianOperator> build_floquet_halves(
    int sites, const DisorderRealization& dis) {
    const int L = sites;
    if (L < 4) throw config_error("build_floquet_halves: L < 4 double-counts periodic bonds");
    if (static_cast<int>(dis.fields_x.size()) != L ||
        static_cast<int>(dis.fields_y.size()) != L ||
        static_cast<int>(dis.fields_z.size()) != L)
        throw config_error("build_floquet_halves: needs x, y and z field vectors");

    std::vector<double> half_x(L), half_y(L), neg_half_y(L), half_z(L), zero(L, 0.0);
    for (int i = 0; i < L; ++i) {
        half_x[i] = 0.5 * dis.fields_x[i];
        half_y[i] = 0.5 * dis.fields_y[i];
        neg_half_y[i] = -0.5 * dis.fields_y[i];
        half_z[i] = 0.5 * dis.fields_z[i];
    }
    return {heisenberg_with_fields(L, half_x, half_y, zero),
            heisenberg_with_fields(L, zero, neg_half_y, half_z)};
}

}  // namespace sfflab
