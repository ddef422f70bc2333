#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfflab/linalg.hpp"

namespace sfflab {

// Energy unit is J = 1 throughout; all couplings below are dimensionless
// multiples of J, times are in 1/J.

struct SpinModelSpec {
    int sites = 8;         // L, even, 4 <= L <= 14 (periodic wrap with L<4 double-counts bonds)
    double delta = 0.8;    // zz anisotropy
    double j2 = 0.02;      // next-nearest xy coupling
    double delta2 = 0.06;  // next-nearest zz coupling
    double w = 2.0;        // disorder strength

    void validate() const;
};

enum class DisorderLaw { uniform, normal };

DisorderLaw parse_disorder_law(const std::string& s);

struct DisorderRealization {
    std::uint64_t seed = 0;
    std::vector<double> fields_z;
    std::vector<double> fields_x;  // set for Floquet models only
    std::vector<double> fields_y;
};

// Bit-patterns with popcount (L+Sz)/2, ascending as integers; bit i = site i,
// 1 = spin up.
struct SectorBasis {
    int sites = 0;
    int sz = 0;
    std::vector<std::uint32_t> states;

    int dim() const { return static_cast<int>(states.size()); }
};

struct HermitianOperator {
    int dim = 0;
    CMat matrix;
    std::string basis;  // "full:<L>" or "sector:<L>:<Sz>"
};

// fields_z ~ U[-W,W] (or N(0,1) for the normal law, where fields_x/y are
// sampled too). Deterministic given (spec, law, seed).
DisorderRealization sample_disorder(const SpinModelSpec& spec, DisorderLaw law,
                                    std::uint64_t seed);

SectorBasis sector_basis(int sites, int sz);

std::uint64_t binomial(int n, int k);

// Disordered XXZ chain
//   H = J sum_i { sx sx + sy sy + delta sz sz }_{i,i+1}
//     + J sum_i { j2 (sx sx + sy sy) + delta2 sz sz }_{i,i+2}
//     + sum_i h_i sz_i,         periodic.
// With `phases`, the flip-flop term from site j to k carries e^{i(phi_k-phi_j)}.
// sector == nullptr builds the full 2^L matrix.
HermitianOperator build_heisenberg(const SpinModelSpec& spec,
                                   const DisorderRealization& dis,
                                   const SectorBasis* sector,
                                   const std::vector<double>* phases = nullptr);

// General long-range XXZ from per-pair coupling tables (used for the
// Rydberg-exported models). jxy/jz are symmetric L x L tables, upper triangle
// read.
HermitianOperator build_xxz(int sites, const std::vector<double>& jxy,
                            const std::vector<double>& jz,
                            std::span<const double> fields_z,
                            const SectorBasis* sector,
                            const std::vector<double>* phases = nullptr);

// Kicked Ising layer, full 2^L space:
//   H = J sum_i ( s^a_i s^a_{i+1} + h_i s^b_i ),  b the cyclic successor of a.
HermitianOperator build_ising_layer(char axis, int sites,
                                    std::span<const double> fields);

// The two half-period Heisenberg Hamiltonians of the driven model:
// both carry the clean isotropic chain; the first adds (h^x sx + h^y sy)/2,
// the second (h^z sz - h^y sy)/2, so their mean has no sy term.
std::pair<HermitianOperator, HermitianOperator> build_floquet_halves(
    int sites, const DisorderRealization& dis);

}  // namespace sfflab
