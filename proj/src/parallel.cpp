#include "latentgeo/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace latentgeo {

int resolve_workers(int workers) {
#ifdef _OPENMP
    if (workers <= 0) return omp_get_max_threads();
    return workers;
#else
    (void)workers;
    return 1;
#endif
}

namespace {

void check_nt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw InvalidInput("gemm_nt: inner dims differ");
}
void check_nn(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw InvalidInput("gemm_nn: inner dims differ");
}
void check_tn(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw InvalidInput("gemm_tn: inner dims differ");
}

inline void nt_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    const double* arow = &a.a[std::size_t(i) * a.cols];
    double* crow = &c.a[std::size_t(i) * c.cols];
    for (int j = 0; j < b.rows; ++j) {
        const double* brow = &b.a[std::size_t(j) * b.cols];
        double s = 0.0;
        for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
        crow[j] = s;
    }
}

inline void nn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    const double* arow = &a.a[std::size_t(i) * a.cols];
    double* crow = &c.a[std::size_t(i) * c.cols];
    for (int k = 0; k < a.cols; ++k) {
        double aik = arow[k];
        const double* brow = &b.a[std::size_t(k) * b.cols];
        for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
}

inline void tn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    // c(i,j) = sum_r a(r,i) * b(r,j)
    double* crow = &c.a[std::size_t(i) * c.cols];
    for (int r = 0; r < a.rows; ++r) {
        double ari = a(r, i);
        const double* brow = &b.a[std::size_t(r) * b.cols];
        for (int j = 0; j < b.cols; ++j) crow[j] += ari * brow[j];
    }
}

} // namespace

Matrix gemm_nt_serial(const Matrix& a, const Matrix& b) {
    check_nt(a, b);
    Matrix c(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) nt_row(a, b, c, i);
    return c;
}

Matrix gemm_nt(const Matrix& a, const Matrix& b, int workers) {
    check_nt(a, b);
    Matrix c(a.rows, b.rows);
    const int nw = resolve_workers(workers);
#pragma omp parallel for schedule(static) num_threads(nw)
    for (int i = 0; i < a.rows; ++i) nt_row(a, b, c, i);
    return c;
}

Matrix gemm_nn_serial(const Matrix& a, const Matrix& b) {
    check_nn(a, b);
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) nn_row(a, b, c, i);
    return c;
}

Matrix gemm_nn(const Matrix& a, const Matrix& b, int workers) {
    check_nn(a, b);
    Matrix c(a.rows, b.cols);
    const int nw = resolve_workers(workers);
#pragma omp parallel for schedule(static) num_threads(nw)
    for (int i = 0; i < a.rows; ++i) nn_row(a, b, c, i);
    return c;
}

Matrix gemm_tn_serial(const Matrix& a, const Matrix& b) {
    check_tn(a, b);
    Matrix c(a.cols, b.cols);
    for (int i = 0; i < a.cols; ++i) tn_row(a, b, c, i);
    return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b, int workers) {
    check_tn(a, b);
    Matrix c(a.cols, b.cols);
    const int nw = resolve_workers(workers);
#pragma omp parallel for schedule(static) num_threads(nw)
    for (int i = 0; i < a.cols; ++i) tn_row(a, b, c, i);
    return c;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    const int nw = resolve_workers(workers);
    if (nw <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#pragma omp parallel for schedule(dynamic, 1) num_threads(nw)
    for (int i = 0; i < n; ++i) fn(i);
}

} // namespace latentgeo
