#include "latentgeo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace latentgeo {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vec Matrix::col(int j) const {
    Vec v(rows);
    for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
    return v;
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

SymMatrix SymMatrix::scaled(double c) const {
    SymMatrix m = *this;
    for (double& v : m.a) v *= c;
    return m;
}

SymMatrix gram(const Matrix& j) {
    SymMatrix m(j.cols);
    for (int p = 0; p < j.cols; ++p) {
        for (int q = p; q < j.cols; ++q) {
            double s = 0.0;
            for (int r = 0; r < j.rows; ++r) s += j(r, p) * j(r, q);
            m.set(p, q, s);
        }
    }
    return m;
}

SymMatrix weighted_gram(const Matrix& j, const Vec& w) {
    if (int(w.size()) != j.rows) throw InvalidInput("weighted_gram: weight size != rows");
    SymMatrix m(j.cols);
    for (int p = 0; p < j.cols; ++p) {
        for (int q = p; q < j.cols; ++q) {
            double s = 0.0;
            for (int r = 0; r < j.rows; ++r) s += w[r] * j(r, p) * j(r, q);
            m.set(p, q, s);
        }
    }
    return m;
}

Vec matvec(const Matrix& m, const Vec& x) {
    if (int(x.size()) != m.cols) throw InvalidInput("matvec: dimension mismatch");
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        const double* row = &m.a[std::size_t(i) * m.cols];
        for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw InvalidInput("matmul: dimension mismatch");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double quadratic_form(const SymMatrix& m, const Vec& v) {
    if (int(v.size()) != m.dim) throw InvalidInput("quadratic_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) s += v[i] * m(i, j) * v[j];
    return s;
}

namespace {

double offdiag_norm(const SymMatrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.dim; ++i)
        for (int j = i + 1; j < m.dim; ++j) s += 2.0 * m(i, j) * m(i, j);
    return std::sqrt(s);
}

} // namespace

EigenPairs sym_eig(const SymMatrix& m) {
    if (m.dim < 1) throw InvalidInput("sym_eig: dim must be >= 1");
    for (double v : m.a)
        if (!std::isfinite(v)) throw InvalidInput("sym_eig: non-finite entry");

    const int n = m.dim;
    SymMatrix a = m;
    Matrix v = Matrix::identity(n);
    const double scale = std::max(m.frobenius(), 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (offdiag_norm(a) <= 1e-15 * scale) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                double app = a(p, p), aqq = a(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    double akp = a(k, p), akq = a(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenPairs out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

EigenPairs sym_eig_psd(const SymMatrix& m) {
    EigenPairs e = sym_eig(m);
    double scale = 0.0;
    for (double l : e.values) scale = std::max(scale, std::abs(l));
    const double tol = 1e-10 * scale;
    for (double& l : e.values) {
        if (l < -tol)
            throw NotPositiveDefinite("eigenvalue " + std::to_string(l) +
                                      " below PSD tolerance " + std::to_string(-tol));
        if (l < 0.0) l = 0.0;
    }
    return e;
}

double log_sqrt_det(const SymMatrix& m) {
    EigenPairs e = sym_eig(m);
    double s = 0.0;
    for (double l : e.values) {
        if (l <= 0.0)
            throw NotPositiveDefinite("log_sqrt_det: eigenvalue " + std::to_string(l) +
                                      " is not positive");
        s += std::log(l);
    }
    return 0.5 * s;
}

double condition_number(const SymMatrix& m) {
    EigenPairs e = sym_eig_psd(m);
    double lmin = e.values.front();
    double lmax = e.values.back();
    if (lmin <= 0.0)
        throw SingularMetric("condition_number: lambda_min = " + std::to_string(lmin));
    return lmax / lmin;
}

} // namespace latentgeo
