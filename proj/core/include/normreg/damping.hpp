#pragma once

#include <vector>

#include "normreg/matrix.hpp"

namespace normreg {

/// Quantile ladder for the damping-weight scheme. qhat holds q_0..q_{t+1}
/// with q_0 = 0 and q_{t+1} = 2*K*n_ref; blocks is the strictly increasing
/// index sequence k_0 = 0 < ... < k_ell = t+1 chosen so that consecutive
/// block thresholds stay within a factor of two or are adjacent.
struct DampingPlan {
    double K = 0.0;
    index_t t = 0;
    std::vector<double> qhat;
    std::vector<index_t> blocks;
    double L_damp = 64.0;
    index_t n_ref = 0;
};

/// Per-position damping weights for one row. W_j = min(1, L*2^{-k_i}*n/nu_i)
/// where i = block_of[j] and n is the row length.
struct RowWeights {
    std::vector<double> W;
    std::vector<index_t> nu;
    std::vector<index_t> block_of;
};

/// Per-column products of row weights, evaluated as a fixed-order sum of
/// logs for bit stability. J collects the columns with V_j < e^{-2}.
struct ColumnProducts {
    std::vector<double> V;
    IndexSet J;
};

struct SmallColumnDiagnostics {
    index_t j0_size = 0;
    double v_min = 1.0;
    double v_max = 1.0;
    /// max over rows of the squared-entry mass outside the removed columns
    double max_row_residual = 0.0;
    /// max over rows of the damped mass attributed to that row
    double max_row_damped = 0.0;
};

struct SmallColumnResult {
    IndexSet J0;
    SmallColumnDiagnostics diag;
};

/// Empirical tail-quantile ladder. With m samples sorted descending,
/// q_k is the ceil(m*2^{-k})-th largest; t = ceil(log2(K*n_ref)) + 1
/// clamped to at least 1, K = 1/ln(1/epsilon).
DampingPlan build_quantile_ladder(const std::vector<double>& samples, double epsilon,
                                  index_t n_ref, double L_damp);

/// Assigns each nonnegative X_j to its ladder block (left-closed intervals;
/// values at or above the cap clamp into the top block) and computes the
/// block-count weights. Total on any nonnegative input.
RowWeights damp_row(const std::vector<double>& X, const DampingPlan& plan);

/// Damps every row of M (squared entries as X) against the plan and
/// multiplies the weights down each column.
ColumnProducts column_products(const DenseMatrix& M, const DampingPlan& plan);

/// Column-removal pass for a strictly upper triangular T with bounded
/// entries: splits T into the two interleaved halves, damps each against
/// samples drawn from the other, and returns the original-index columns
/// whose weight product fell below e^{-2}. Throws if the residual mass
/// check against the damped mass fails, which would mean a defect here.
SmallColumnResult regularize_small_columns(const DenseMatrix& T, double epsilon,
                                           double L_damp);

} // namespace normreg
