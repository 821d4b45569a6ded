#pragma once

#include <vector>

#include "normreg/matrix.hpp"

namespace normreg {

// Magnitude cutoffs separating the four entry classes of a square input.
// All three scale like sqrt(n); the middle band widens as epsilon shrinks.
struct BucketThresholds {
    double s_thr = 0.0;
    double m_thr = 0.0;
    double l_thr = 0.0;
};

// Thresholds for an n-by-n input at budget epsilon in (0, 1/2].
BucketThresholds bucket_thresholds(index_t n, double epsilon);

// Entrywise split T = S + M1 + M2 + L with disjoint supports. Bands are
// left-open right-closed, so a value exactly at a cutoff goes downward.
struct BucketDecomposition {
    DenseMatrix S;
    DenseMatrix M1;
    DenseMatrix M2;
    DenseMatrix L;
    BucketThresholds thresholds;
};

BucketDecomposition decompose(const DenseMatrix& T, double epsilon);

enum class Stage { L, M1, M2, SCols, SRows };

// One handler's verdict: the rows/cols it wants zeroed, whether the count
// stayed inside its budget, and the two numbers behind that flag.
struct StageMask {
    SubmatrixMask mask;
    Stage stage = Stage::L;
    bool ok = true;
    index_t count = 0;
    double budget = 0.0;
};

// Large entries are so rare in-model that their rows and columns fit in an
// epsilon*n budget outright; the mask is just their support.
StageMask handle_L(const DenseMatrix& L, double epsilon);

// Rows or columns carrying more than d = ceil(deg_mult*max(1, ln(1/eps)))
// nonzeros give up all their entries; what remains has row and column
// degree at most d, hence schur_bound at most d*m_thr.
StageMask handle_M1(const DenseMatrix& M1, double epsilon, double deg_mult = 10.0);

// Medium-high entries: drop every row with two or more nonzeros plus every
// single-nonzero row whose entry sits in a column that collects two or more
// of them; mirrored for columns. Afterwards each row and column keeps at
// most one nonzero, so the remainder's norm is at most l_thr.
StageMask handle_M2(const DenseMatrix& M2, double epsilon, double C_budget = 4.0);

} // namespace normreg
