#include "normreg/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace normreg {

DenseMatrix::DenseMatrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("DenseMatrix: negative dimension");
    a_.assign(static_cast<std::size_t>(rows * cols), 0.0);
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (rows < 0 || cols < 0) throw DimensionError("DenseMatrix: negative dimension");
    if (a_.size() != static_cast<std::size_t>(rows * cols))
        throw DimensionError("DenseMatrix: entries.length != rows*cols");
    if (!all_finite()) throw ContractError("DenseMatrix: non-finite entry");
}

bool DenseMatrix::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool DenseMatrix::is_strictly_upper_triangular() const {
    if (rows_ != cols_) return false;
    for (index_t i = 0; i < rows_; ++i)
        for (index_t j = 0; j <= i && j < cols_; ++j)
            if ((*this)(i, j) != 0.0) return false;
    return true;
}

bool DenseMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (index_t i = 0; i < rows_; ++i)
        for (index_t j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

bool DenseMatrix::is_zero() const {
    for (double v : a_)
        if (v != 0.0) return false;
    return true;
}

index_t DenseMatrix::nonzero_count() const {
    index_t c = 0;
    for (double v : a_)
        if (v != 0.0) ++c;
    return c;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix T(cols_, rows_);
    for (index_t i = 0; i < rows_; ++i)
        for (index_t j = 0; j < cols_; ++j)
            T(j, i) = (*this)(i, j);
    return T;
}

IndexSet IndexSet::of(std::vector<index_t> indices, index_t bound) {
    if (bound < 0) throw DimensionError("IndexSet: negative bound");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!indices.empty() && (indices.front() < 0 || indices.back() >= bound))
        throw DimensionError("IndexSet: index out of range");
    IndexSet s;
    s.idx_ = std::move(indices);
    s.bound_ = bound;
    return s;
}

IndexSet IndexSet::all(index_t bound) {
    std::vector<index_t> v(static_cast<std::size_t>(bound));
    for (index_t i = 0; i < bound; ++i) v[static_cast<std::size_t>(i)] = i;
    return of(std::move(v), bound);
}

bool IndexSet::contains(index_t i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
}

IndexSet IndexSet::unioned(const IndexSet& o) const {
    if (bound_ != o.bound_) throw DimensionError("IndexSet::unioned: bound mismatch");
    std::vector<index_t> v;
    v.reserve(idx_.size() + o.idx_.size());
    std::merge(idx_.begin(), idx_.end(), o.idx_.begin(), o.idx_.end(), std::back_inserter(v));
    return of(std::move(v), bound_);
}

IndexSet IndexSet::complement() const {
    std::vector<index_t> v;
    v.reserve(static_cast<std::size_t>(bound_ - size()));
    std::size_t p = 0;
    for (index_t i = 0; i < bound_; ++i) {
        if (p < idx_.size() && idx_[p] == i) {
            ++p;
        } else {
            v.push_back(i);
        }
    }
    return of(std::move(v), bound_);
}

std::vector<char> IndexSet::bitmap() const {
    std::vector<char> b(static_cast<std::size_t>(bound_), 0);
    for (index_t i : idx_) b[static_cast<std::size_t>(i)] = 1;
    return b;
}

DenseMatrix restrict_columns(const DenseMatrix& A, const IndexSet& keep) {
    if (keep.bound() != A.cols())
        throw DimensionError("restrict_columns: keep.bound != A.cols");
    DenseMatrix R(A.rows(), A.cols());
    const auto bm = keep.bitmap();
    for (index_t i = 0; i < A.rows(); ++i) {
        const double* src = A.row_ptr(i);
        double* dst = R.row_ptr(i);
        for (index_t j = 0; j < A.cols(); ++j)
            dst[j] = bm[static_cast<std::size_t>(j)] ? src[j] : 0.0;
    }
    return R;
}

DenseMatrix restrict_rows(const DenseMatrix& A, const IndexSet& keep) {
    if (keep.bound() != A.rows())
        throw DimensionError("restrict_rows: keep.bound != A.rows");
    DenseMatrix R(A.rows(), A.cols());
    for (index_t i : keep.indices())
        std::copy(A.row_ptr(i), A.row_ptr(i) + A.cols(), R.row_ptr(i));
    return R;
}

DenseMatrix zero_block(const DenseMatrix& A, const SubmatrixMask& mask) {
    if (mask.rows.bound() != A.rows() || mask.cols.bound() != A.cols())
        throw DimensionError("zero_block: mask bounds do not match matrix shape");
    DenseMatrix R = A;
    for (index_t i : mask.rows.indices()) {
        double* r = R.row_ptr(i);
        for (index_t j : mask.cols.indices()) r[j] = 0.0;
    }
    return R;
}

DenseMatrix anti_transpose(const DenseMatrix& A) {
    if (A.rows() != A.cols())
        throw DimensionError("anti_transpose: matrix must be square");
    const index_t n = A.rows();
    DenseMatrix R(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j)
            R(n - 1 - j, n - 1 - i) = A(i, j);
    return R;
}

} // namespace normreg
