#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "normreg/errors.hpp"

namespace normreg {

using index_t = std::int64_t;

/// Dense row-major matrix of doubles. Entries are required to stay finite;
/// the checked constructor rejects NaN and infinity up front.
class DenseMatrix {
public:
    DenseMatrix() = default;

    /// rows x cols, zero-filled.
    DenseMatrix(index_t rows, index_t cols);

    /// Takes ownership of a row-major entry vector of length rows*cols.
    DenseMatrix(index_t rows, index_t cols, std::vector<double> entries);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double operator()(index_t i, index_t j) const {
        return a_[static_cast<std::size_t>(i * cols_ + j)];
    }
    double& operator()(index_t i, index_t j) {
        return a_[static_cast<std::size_t>(i * cols_ + j)];
    }

    const double* row_ptr(index_t i) const { return a_.data() + i * cols_; }
    double* row_ptr(index_t i) { return a_.data() + i * cols_; }

    const std::vector<double>& entries() const { return a_; }

    bool all_finite() const;
    bool is_strictly_upper_triangular() const;
    bool is_symmetric() const;
    bool is_zero() const;
    index_t nonzero_count() const;
    DenseMatrix transposed() const;

    bool operator==(const DenseMatrix& o) const = default;

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> a_;
};

/// Sorted set of indices drawn from [0, bound). Used for row and column
/// masks; bound is carried so set algebra can reject mismatched universes.
class IndexSet {
public:
    IndexSet() = default;

    /// Sorts, deduplicates, and range-checks the given indices.
    static IndexSet of(std::vector<index_t> indices, index_t bound);
    static IndexSet all(index_t bound);
    static IndexSet empty_set(index_t bound) { return of({}, bound); }

    const std::vector<index_t>& indices() const { return idx_; }
    index_t bound() const { return bound_; }
    index_t size() const { return static_cast<index_t>(idx_.size()); }
    bool empty() const { return idx_.empty(); }
    bool contains(index_t i) const;

    IndexSet unioned(const IndexSet& o) const;
    IndexSet complement() const;

    /// bound-length vector with 1 at member positions.
    std::vector<char> bitmap() const;

    bool operator==(const IndexSet& o) const = default;

private:
    std::vector<index_t> idx_;
    index_t bound_ = 0;
};

/// Row and column index sets naming a submatrix inside a fixed shape.
struct SubmatrixMask {
    IndexSet rows;
    IndexSet cols;
    bool operator==(const SubmatrixMask&) const = default;
};

/// Copy of A with every column outside keep zeroed.
DenseMatrix restrict_columns(const DenseMatrix& A, const IndexSet& keep);

/// Copy of A with every row outside keep zeroed.
DenseMatrix restrict_rows(const DenseMatrix& A, const IndexSet& keep);

/// Copy of A with the mask.rows x mask.cols block zeroed.
DenseMatrix zero_block(const DenseMatrix& A, const SubmatrixMask& mask);

/// Reflection across the anti-diagonal: (i, j) -> (n-1-j, n-1-i).
DenseMatrix anti_transpose(const DenseMatrix& A);

} // namespace normreg
