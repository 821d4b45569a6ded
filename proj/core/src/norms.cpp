#include "normreg/norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kernels.hpp"

namespace normreg {

namespace {

// y = A x, x in R^cols, y in R^rows.
void apply(const DenseMatrix& A, const double* x, double* y) {
    const index_t m = A.rows(), k = A.cols();
    for (index_t i = 0; i < m; ++i) y[i] = detail::dot(A.row_ptr(i), x, k);
}

// y = A^T x, x in R^rows, y in R^cols.
void apply_transpose(const DenseMatrix& A, const double* x, double* y) {
    const index_t m = A.rows(), k = A.cols();
    std::fill(y, y + k, 0.0);
    for (index_t i = 0; i < m; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        detail::axpy(y, xi, A.row_ptr(i), k);
    }
}

double norm2(const std::vector<double>& v) {
    return std::sqrt(detail::sumsq(v.data(), static_cast<index_t>(v.size())));
}

} // namespace

double norm_2_to_inf(const DenseMatrix& A) {
    double best = 0.0;
    for (index_t i = 0; i < A.rows(); ++i)
        best = std::max(best, detail::sumsq(A.row_ptr(i), A.cols()));
    return std::sqrt(best);
}

NormEstimate detail::power_norm(const DenseMatrix& A, double rel_tol, index_t max_iters,
                                std::vector<double>* v_io) {
    if (rel_tol <= 0.0) throw ParameterError("op_norm_estimate: rel_tol must be positive");
    if (max_iters < 1) throw ParameterError("op_norm_estimate: max_iters must be at least 1");
    if (A.empty() || A.is_zero()) return {0.0, true};

    // Iterate on the smaller side; one Gram step is A then A^T (or the
    // reverse), and the intermediate vector's length is ||A v||.
    const bool on_cols = A.cols() <= A.rows();
    const index_t dim = on_cols ? A.cols() : A.rows();
    const index_t odim = on_cols ? A.rows() : A.cols();

    const double stall_floor = norm_2_to_inf(A) / std::sqrt(static_cast<double>(dim));

    std::vector<double> v(static_cast<std::size_t>(dim),
                          1.0 / std::sqrt(static_cast<double>(dim)));
    if (v_io != nullptr && v_io->size() == v.size()) {
        const double nw = norm2(*v_io);
        if (nw > 0.0 && std::isfinite(nw)) {
            for (std::size_t p = 0; p < v.size(); ++p) v[p] = (*v_io)[p] / nw;
        }
    }
    std::vector<double> mid(static_cast<std::size_t>(odim));
    std::vector<double> g(static_cast<std::size_t>(dim));

    double best = 0.0;
    bool converged = false;
    bool perturbed = false;

    auto perturb = [&](std::vector<double>& x) {
        x[0] += 1.0;
        double nx = norm2(x);
        if (nx == 0.0) {
            std::fill(x.begin(), x.end(), 0.0);
            x[std::min<std::size_t>(1, x.size() - 1)] = 1.0;
        } else {
            for (double& xi : x) xi /= nx;
        }
    };

    // Stop on the estimate, not the iterate: near-degenerate top singular
    // values stall the vector long after the value has settled. Two
    // consecutive small steps guard against plateaus that still climb.
    double prev = -1.0;
    int stable = 0;
    for (index_t it = 0; it < max_iters; ++it) {
        if (on_cols) {
            apply(A, v.data(), mid.data());
            apply_transpose(A, mid.data(), g.data());
        } else {
            apply_transpose(A, v.data(), mid.data());
            apply(A, mid.data(), g.data());
        }
        const double sigma = norm2(mid);
        best = std::max(best, sigma);

        const double gn = norm2(g);
        if (gn == 0.0) {
            // v is in the Gram null space; perturb once, else give up.
            if (!perturbed) {
                perturbed = true;
                perturb(v);
                prev = -1.0;
                stable = 0;
                continue;
            }
            converged = true;
            break;
        }
        v = g;
        for (double& vi : v) vi /= gn;

        if (prev >= 0.0 && std::fabs(sigma - prev) <= rel_tol * sigma) {
            if (++stable >= 2) {
                if (!perturbed && sigma < stall_floor) {
                    perturbed = true;
                    perturb(v);
                    prev = -1.0;
                    stable = 0;
                    continue;
                }
                converged = true;
                break;
            }
        } else {
            stable = 0;
        }
        prev = sigma;
    }
    if (v_io != nullptr) *v_io = v;
    return {best, converged};
}

NormEstimate op_norm_estimate(const DenseMatrix& A, double rel_tol, index_t max_iters) {
    return detail::power_norm(A, rel_tol, max_iters, nullptr);
}

double norm_inf_to_2_bruteforce(const DenseMatrix& A) {
    const index_t m = A.cols();
    if (m > 20) throw CapacityError("norm_inf_to_2_bruteforce: more than 20 columns");
    if (A.empty()) return 0.0;
    const index_t rows = A.rows();

    // Column-major copy so a sign flip touches one contiguous column.
    std::vector<double> col(static_cast<std::size_t>(rows * m));
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < m; ++j)
            col[static_cast<std::size_t>(j * rows + i)] = A(i, j);

    std::vector<double> y(static_cast<std::size_t>(rows));
    std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
    for (index_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (index_t j = 0; j < m; ++j) s += A(i, j);
        y[static_cast<std::size_t>(i)] = s;
    }

    auto sumsq = [&]() {
        double s = 0.0;
        for (double yi : y) s += yi * yi;
        return s;
    };

    double best = sumsq();
    // x_0 stays +1 by symmetry; Gray-code walk over the remaining bits
    // flips exactly one sign per step.
    const std::uint64_t steps = (m >= 1) ? (1ull << (m - 1)) : 1ull;
    for (std::uint64_t i = 1; i < steps; ++i) {
        const index_t j = static_cast<index_t>(std::countr_zero(i)) + 1;
        const double delta = -2.0 * sign[static_cast<std::size_t>(j)];
        sign[static_cast<std::size_t>(j)] = -sign[static_cast<std::size_t>(j)];
        const double* cj = col.data() + j * rows;
        for (index_t r = 0; r < rows; ++r) y[static_cast<std::size_t>(r)] += delta * cj[r];
        best = std::max(best, sumsq());
    }
    return std::sqrt(best);
}

double schur_bound(const DenseMatrix& A) {
    double row_max = 0.0;
    std::vector<double> colsum(static_cast<std::size_t>(A.cols()), 0.0);
    for (index_t i = 0; i < A.rows(); ++i) {
        const double* r = A.row_ptr(i);
        double s = 0.0;
        for (index_t j = 0; j < A.cols(); ++j) {
            const double a = std::fabs(r[j]);
            s += a;
            colsum[static_cast<std::size_t>(j)] += a;
        }
        row_max = std::max(row_max, s);
    }
    double col_max = 0.0;
    for (double c : colsum) col_max = std::max(col_max, c);
    return std::sqrt(row_max * col_max);
}

} // namespace normreg
