#pragma once

#include <functional>

#include "latentgeo/linalg.hpp"

namespace latentgeo {

/// OpenMP kernels with serial reference implementations. Every parallel
/// kernel computes each output element on exactly one thread with the same
/// fixed-order inner summation as its serial twin, so results are
/// bit-identical for any worker count. Tests assert that equality and the
/// bench tool times the two against each other.

/// 0 means "use all hardware threads".
int resolve_workers(int workers);

/// a (m x k) * b^T with b given as (n x k): returns m x n.
Matrix gemm_nt_serial(const Matrix& a, const Matrix& b);
Matrix gemm_nt(const Matrix& a, const Matrix& b, int workers = 0);

/// a (m x k) * b (k x n): returns m x n.
Matrix gemm_nn_serial(const Matrix& a, const Matrix& b);
Matrix gemm_nn(const Matrix& a, const Matrix& b, int workers = 0);

/// a^T (k x m) * b (k x n): returns m x n.
Matrix gemm_tn_serial(const Matrix& a, const Matrix& b);
Matrix gemm_tn(const Matrix& a, const Matrix& b, int workers = 0);

/// Runs fn(i) for i in [0,n) across workers; each index is processed once.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace latentgeo
