#pragma once

#include <vector>

#include "latentgeo/errors.hpp"

namespace latentgeo {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);

/// Dense row-major matrix.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    static Matrix identity(int n);
    Vec col(int j) const;
};

/// Symmetric matrix, full row-major storage. set() mirrors so symmetry holds
/// by construction.
struct SymMatrix {
    int dim = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(int n) : dim(n), a(std::size_t(n) * n, 0.0) {}

    double operator()(int i, int j) const { return a[std::size_t(i) * dim + j]; }
    void set(int i, int j, double v) {
        a[std::size_t(i) * dim + j] = v;
        a[std::size_t(j) * dim + i] = v;
    }

    static SymMatrix identity(int n);
    double frobenius() const;
    SymMatrix scaled(double c) const;
};

/// Eigenvalues ascending; i-th column of `vectors` pairs with values[i].
struct EigenPairs {
    std::vector<double> values;
    Matrix vectors;
};

/// m = J^T J, symmetric PSD by construction.
SymMatrix gram(const Matrix& j);

/// J^T diag(w) J.
SymMatrix weighted_gram(const Matrix& j, const Vec& w);

Vec matvec(const Matrix& m, const Vec& x);
Matrix matmul(const Matrix& a, const Matrix& b);

/// v^T m v.
double quadratic_form(const SymMatrix& m, const Vec& v);

/// Full symmetric eigendecomposition by cyclic Jacobi rotations. Matrices
/// here are small (latent dims, <= ~50), so accuracy wins over speed.
EigenPairs sym_eig(const SymMatrix& m);

/// (1/2) sum log lambda_i. Throws NotPositiveDefinite unless all lambda > 0.
double log_sqrt_det(const SymMatrix& m);

/// lambda_max / lambda_min. Eigenvalues in (-1e-10*|lambda|_max, 0] clamp to
/// zero; a clamped or negative lambda_min throws SingularMetric.
double condition_number(const SymMatrix& m);

/// PSD tolerance rule shared by the metric consumers: eigenvalues below
/// -1e-10 * max|lambda| throw NotPositiveDefinite, small negatives clamp to 0.
EigenPairs sym_eig_psd(const SymMatrix& m);

} // namespace latentgeo
