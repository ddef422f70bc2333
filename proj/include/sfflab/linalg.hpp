#pragma once

#include <complex>
#include <vector>

namespace sfflab {

using cplx = std::complex<double>;

// Dense complex matrix, column-major (LAPACK layout). Element (i,j) is
// a[i + j*n].
struct CMat {
    int n = 0;
    std::vector<cplx> a;

    CMat() = default;
    explicit CMat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}

    cplx& at(int i, int j) { return a[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n]; }
    const cplx& at(int i, int j) const { return a[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n]; }

    static CMat identity(int dim) {
        CMat m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

// max_ij |M - M^dagger|
double hermiticity_residual(const CMat& m);
// max_ij |U^dagger U - I|
double unitarity_residual(const CMat& m);

// C = A * B (zgemm)
CMat matmul(const CMat& a, const CMat& b);
// C = A * B^dagger
CMat matmul_bdagger(const CMat& a, const CMat& b);

// Eigendecomposition of a Hermitian matrix (zheev). On return `a` holds the
// eigenvectors as columns when want_vectors, eigenvalues ascending.
// Throws numerical_error on non-convergence.
void eigh_inplace(CMat& a, std::vector<double>& evals, bool want_vectors);

// Schur decomposition of a (near-)unitary matrix (zgees): u = Q T Q^dagger
// with Q unitary. For a normal matrix T is diagonal, so the Schur vectors are
// orthonormal eigenvectors; the off-diagonal residual of T is checked against
// `normality_tol`. `q` may be null when only eigenvalues are needed.
void schur_unitary(const CMat& u, std::vector<cplx>& eigenvalues, CMat* q,
                   double normality_tol = 1e-8);

}  // namespace sfflab
