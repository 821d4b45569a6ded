#pragma once

#include <cstddef>
#include <vector>

#include "normreg/matrix.hpp"
#include "normreg/norms.hpp"

// Internal hot-loop kernels. Four-lane fixed-association reductions: the
// lane split is part of the numeric contract, so results stay bit-identical
// across builds while the compiler is free to vectorize.
namespace normreg::detail {

// The estimator behind op_norm_estimate, with an optional start/result
// vector so callers scoring a family of nearby matrices can chain the
// converged direction from one into the next.
NormEstimate power_norm(const DenseMatrix& A, double rel_tol, index_t max_iters,
                        std::vector<double>* v_io);

inline double dot(const double* a, const double* b, index_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    index_t j = 0;
    for (; j + 4 <= n; j += 4) {
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
    }
    for (; j < n; ++j) s0 += a[j] * b[j];
    return (s0 + s1) + (s2 + s3);
}

inline double sumsq(const double* a, index_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    index_t j = 0;
    for (; j + 4 <= n; j += 4) {
        s0 += a[j] * a[j];
        s1 += a[j + 1] * a[j + 1];
        s2 += a[j + 2] * a[j + 2];
        s3 += a[j + 3] * a[j + 3];
    }
    for (; j < n; ++j) s0 += a[j] * a[j];
    return (s0 + s1) + (s2 + s3);
}

inline void axpy(double* y, double a, const double* x, index_t n) {
    for (index_t j = 0; j < n; ++j) y[j] += a * x[j];
}

} // namespace normreg::detail
