#include "sfflab/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cstring>
#include <string>

#include "sfflab/errors.hpp"

extern "C" {
void zgemm_(const char* transa, const char* transb, const int* m, const int* n,
            const int* k, const void* alpha, const void* a, const int* lda,
            const void* b, const int* ldb, const void* beta, void* c,
            const int* ldc);
}

namespace sfflab {

double hermiticity_residual(const CMat& m) {
    double worst = 0.0;
    for (int j = 0; j < m.n; ++j)
        for (int i = 0; i <= j; ++i)
            worst = std::max(worst, std::abs(m.at(i, j) - std::conj(m.at(j, i))));
    return worst;
}

double unitarity_residual(const CMat& m) {
    const CMat g = matmul_bdagger(m, m);  // U U^dagger
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const cplx want = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            worst = std::max(worst, std::abs(g.at(i, j) - want));
        }
    return worst;
}

static CMat gemm(const char* ta, const char* tb, const CMat& a, const CMat& b) {
    CMat c(a.n);
    const cplx one{1.0, 0.0}, zero{0.0, 0.0};
    zgemm_(ta, tb, &a.n, &a.n, &a.n, &one, a.a.data(), &a.n, b.a.data(), &b.n,
           &zero, c.a.data(), &c.n);
    return c;
}

CMat matmul(const CMat& a, const CMat& b) {
    if (a.n != b.n) throw numerical_error("matmul: dimension mismatch");
    return gemm("N", "N", a, b);
}

CMat matmul_bdagger(const CMat& a, const CMat& b) {
    if (a.n != b.n) throw numerical_error("matmul: dimension mismatch");
    return gemm("N", "C", a, b);
}

void eigh_inplace(CMat& a, std::vector<double>& evals, bool want_vectors) {
    evals.resize(a.n);
    const int info = LAPACKE_zheev(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', a.n,
        reinterpret_cast<lapack_complex_double*>(a.a.data()), a.n, evals.data());
    if (info != 0)
        throw numerical_error("zheev failed to converge (info=" + std::to_string(info) + ")");
}

void schur_unitary(const CMat& u, std::vector<cplx>& eigenvalues, CMat* q,
                   double normality_tol) {
    const int n = u.n;
    CMat t = u;
    eigenvalues.resize(n);
    if (q) *q = CMat(n);
    int sdim = 0;
    const int info = LAPACKE_zgees(
        LAPACK_COL_MAJOR, q ? 'V' : 'N', 'N', nullptr, n,
        reinterpret_cast<lapack_complex_double*>(t.a.data()), n, &sdim,
        reinterpret_cast<lapack_complex_double*>(eigenvalues.data()),
        q ? reinterpret_cast<lapack_complex_double*>(q->a.data()) : nullptr, n);
    if (info != 0)
        throw numerical_error("zgees failed (info=" + std::to_string(info) + ")");
    double offdiag = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i)
            offdiag = std::max(offdiag, std::abs(t.at(i, j)));
    if (offdiag > normality_tol)
        throw numerical_error("schur_unitary: input is not normal (off-diagonal " +
                              std::to_string(offdiag) + ")");
}

}  // namespace sfflab
