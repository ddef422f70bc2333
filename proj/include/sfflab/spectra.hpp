#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sfflab/linalg.hpp"
#include "sfflab/models.hpp"

namespace sfflab {

struct UnitaryOperator {
    int dim = 0;
    CMat matrix;
};

// Eigenvalues ascending. For kind == floquet these are quasienergies
// lambda in [0, 2*pi/period).
struct Spectrum {
    enum class Kind { hamiltonian, floquet };

    Kind kind = Kind::hamiltonian;
    std::vector<double> eigenvalues;
    std::optional<CMat> eigenvectors;  // columns; for floquet, Schur vectors
    double period = 0.0;               // floquet only

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

Spectrum eig_hermitian(const HermitianOperator& h, bool want_vectors);

// U = V e^{-i Lambda t} V^dagger. Requires eigenvectors.
UnitaryOperator propagator(const Spectrum& spec, double t);

// Ordered product prod_k e^{-i tau_k H_k}; the first listed layer is the
// leftmost factor, i.e. it acts last.
UnitaryOperator floquet_operator(
    const std::vector<std::pair<const HermitianOperator*, double>>& layers);

// lambda_l = -arg(mu_l)/period folded into [0, 2*pi/period), ascending.
// want_vectors keeps the Schur basis for product-state sampling.
Spectrum quasienergies(const UnitaryOperator& u, double period,
                       bool want_vectors = false);

// Mean gap over the central window_fraction of levels, and the associated
// characteristic time 2*pi/gap.
struct LevelSpacing {
    double delta_e = 0.0;
    double tau_heisenberg = 0.0;
};

LevelSpacing mean_level_spacing(const Spectrum& spec, double window_fraction = 1.0 / 3.0);

}  // namespace sfflab
