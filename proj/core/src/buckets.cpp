#include "normreg/buckets.hpp"

#include <cmath>

#include "normreg/errors.hpp"

namespace normreg {

namespace {

void check_epsilon(double epsilon, const char* who) {
    if (!(epsilon > 0.0) || epsilon > 0.5)
        throw ParameterError(std::string(who) + ": epsilon outside (0, 1/2]");
}

void check_square(const DenseMatrix& A, const char* who) {
    if (A.rows() != A.cols())
        throw DimensionError(std::string(who) + ": square matrix required");
}

IndexSet collect(const std::vector<char>& marked, index_t n) {
    std::vector<index_t> idx;
    for (index_t i = 0; i < n; ++i)
        if (marked[static_cast<std::size_t>(i)]) idx.push_back(i);
    return IndexSet::of(std::move(idx), n);
}

std::vector<index_t> degrees(const DenseMatrix& A, bool by_row) {
    const index_t n = A.rows();
    std::vector<index_t> deg(static_cast<std::size_t>(n), 0);
    for (index_t i = 0; i < n; ++i) {
        const double* r = A.row_ptr(i);
        for (index_t j = 0; j < n; ++j)
            if (r[j] != 0.0) ++deg[static_cast<std::size_t>(by_row ? i : j)];
    }
    return deg;
}

} // namespace

BucketThresholds bucket_thresholds(index_t n, double epsilon) {
    check_epsilon(epsilon, "bucket_thresholds");
    if (n < 0) throw DimensionError("bucket_thresholds: negative n");
    const double ln = std::log(1.0 / epsilon);
    const double nn = static_cast<double>(n);
    BucketThresholds t;
    t.s_thr = std::sqrt(nn / ln);
    t.m_thr = std::sqrt(nn / (epsilon * ln * ln));
    t.l_thr = 5.0 * std::sqrt(nn / epsilon);
    return t;
}

BucketDecomposition decompose(const DenseMatrix& T, double epsilon) {
    check_epsilon(epsilon, "decompose");
    check_square(T, "decompose");
    const index_t n = T.rows();

    BucketDecomposition out;
    out.thresholds = bucket_thresholds(n, epsilon);
    out.S = DenseMatrix(n, n);
    out.M1 = DenseMatrix(n, n);
    out.M2 = DenseMatrix(n, n);
    out.L = DenseMatrix(n, n);

    for (index_t i = 0; i < n; ++i) {
        const double* src = T.row_ptr(i);
        for (index_t j = 0; j < n; ++j) {
            const double a = src[j];
            const double mag = std::fabs(a);
            if (mag <= out.thresholds.s_thr)
                out.S(i, j) = a;
            else if (mag <= out.thresholds.m_thr)
                out.M1(i, j) = a;
            else if (mag <= out.thresholds.l_thr)
                out.M2(i, j) = a;
            else
                out.L(i, j) = a;
        }
    }
    return out;
}

StageMask handle_L(const DenseMatrix& L, double epsilon) {
    check_epsilon(epsilon, "handle_L");
    check_square(L, "handle_L");
    const index_t n = L.rows();

    std::vector<char> row_hit(static_cast<std::size_t>(n), 0);
    std::vector<char> col_hit(static_cast<std::size_t>(n), 0);
    index_t count = 0;
    for (index_t i = 0; i < n; ++i) {
        const double* r = L.row_ptr(i);
        for (index_t j = 0; j < n; ++j) {
            if (r[j] == 0.0) continue;
            ++count;
            row_hit[static_cast<std::size_t>(i)] = 1;
            col_hit[static_cast<std::size_t>(j)] = 1;
        }
    }

    StageMask out;
    out.stage = Stage::L;
    out.mask.rows = collect(row_hit, n);
    out.mask.cols = collect(col_hit, n);
    out.count = count;
    out.budget = std::floor(epsilon * static_cast<double>(n));
    out.ok = static_cast<double>(count) <= out.budget;
    return out;
}

StageMask handle_M1(const DenseMatrix& M1, double epsilon, double deg_mult) {
    check_epsilon(epsilon, "handle_M1");
    check_square(M1, "handle_M1");
    if (!(deg_mult > 0.0)) throw ParameterError("handle_M1: deg_mult must be positive");
    const index_t n = M1.rows();

    const auto d = static_cast<index_t>(
        std::ceil(deg_mult * std::max(1.0, std::log(1.0 / epsilon))));
    const std::vector<index_t> row_deg = degrees(M1, true);
    const std::vector<index_t> col_deg = degrees(M1, false);

    // An entry offends when its row or its column is overloaded; the mask
    // block then covers every offender.
    std::vector<char> row_hit(static_cast<std::size_t>(n), 0);
    std::vector<char> col_hit(static_cast<std::size_t>(n), 0);
    index_t count = 0;
    for (index_t i = 0; i < n; ++i) {
        const double* r = M1.row_ptr(i);
        for (index_t j = 0; j < n; ++j) {
            if (r[j] == 0.0) continue;
            if (row_deg[static_cast<std::size_t>(i)] <= d &&
                col_deg[static_cast<std::size_t>(j)] <= d)
                continue;
            ++count;
            row_hit[static_cast<std::size_t>(i)] = 1;
            col_hit[static_cast<std::size_t>(j)] = 1;
        }
    }

    StageMask out;
    out.stage = Stage::M1;
    out.mask.rows = collect(row_hit, n);
    out.mask.cols = collect(col_hit, n);
    out.count = count;
    out.budget = std::floor(epsilon * static_cast<double>(n));
    out.ok = static_cast<double>(count) <= out.budget;
    return out;
}

StageMask handle_M2(const DenseMatrix& M2, double epsilon, double C_budget) {
    check_epsilon(epsilon, "handle_M2");
    check_square(M2, "handle_M2");
    if (!(C_budget > 0.0)) throw ParameterError("handle_M2: C_budget must be positive");
    const index_t n = M2.rows();

    const std::vector<index_t> row_deg = degrees(M2, true);
    const std::vector<index_t> col_deg = degrees(M2, false);

    // Column index of the unique nonzero for single-nonzero rows, and the
    // mirror for single-nonzero columns.
    std::vector<index_t> lone_col(static_cast<std::size_t>(n), -1);
    std::vector<index_t> lone_row(static_cast<std::size_t>(n), -1);
    // Per-column nonzero count restricted to single-nonzero rows, and the
    // mirror restricted to single-nonzero columns.
    std::vector<index_t> col_in_r1(static_cast<std::size_t>(n), 0);
    std::vector<index_t> row_in_c1(static_cast<std::size_t>(n), 0);
    for (index_t i = 0; i < n; ++i) {
        const double* r = M2.row_ptr(i);
        for (index_t j = 0; j < n; ++j) {
            if (r[j] == 0.0) continue;
            if (row_deg[static_cast<std::size_t>(i)] == 1) {
                lone_col[static_cast<std::size_t>(i)] = j;
                ++col_in_r1[static_cast<std::size_t>(j)];
            }
            if (col_deg[static_cast<std::size_t>(j)] == 1) {
                lone_row[static_cast<std::size_t>(j)] = i;
                ++row_in_c1[static_cast<std::size_t>(i)];
            }
        }
    }

    std::vector<char> row_hit(static_cast<std::size_t>(n), 0);
    std::vector<char> col_hit(static_cast<std::size_t>(n), 0);
    for (index_t i = 0; i < n; ++i) {
        if (row_deg[static_cast<std::size_t>(i)] >= 2) {
            row_hit[static_cast<std::size_t>(i)] = 1;  // R2
        } else if (row_deg[static_cast<std::size_t>(i)] == 1) {
            const index_t j = lone_col[static_cast<std::size_t>(i)];
            if (col_in_r1[static_cast<std::size_t>(j)] >= 2)
                row_hit[static_cast<std::size_t>(i)] = 1;  // R1'
        }
    }
    for (index_t j = 0; j < n; ++j) {
        if (col_deg[static_cast<std::size_t>(j)] >= 2) {
            col_hit[static_cast<std::size_t>(j)] = 1;  // C2
        } else if (col_deg[static_cast<std::size_t>(j)] == 1) {
            const index_t i = lone_row[static_cast<std::size_t>(j)];
            if (row_in_c1[static_cast<std::size_t>(i)] >= 2)
                col_hit[static_cast<std::size_t>(j)] = 1;  // C1'
        }
    }

    StageMask out;
    out.stage = Stage::M2;
    out.mask.rows = collect(row_hit, n);
    out.mask.cols = collect(col_hit, n);
    out.count = std::max(out.mask.rows.size(), out.mask.cols.size());
    out.budget = std::ceil(C_budget * epsilon * static_cast<double>(n));
    out.ok = static_cast<double>(out.mask.rows.size()) <= out.budget &&
             static_cast<double>(out.mask.cols.size()) <= out.budget;
    return out;
}

} // namespace normreg
