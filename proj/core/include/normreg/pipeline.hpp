#pragma once

#include <string>
#include <vector>

#include "normreg/buckets.hpp"
#include "normreg/gpselect.hpp"
#include "normreg/matrix.hpp"

namespace normreg {

// Knobs for a full regularization run. The defaults are the calibrated
// values used throughout the test suite.
struct RegConfig {
    double epsilon = 0.1;   // in (0, 1/2]
    double L_damp = 64.0;
    double deg_mult = 10.0;
    double C_budget = 4.0;
    GPConfig gp;
    double norm_tol = 1e-9;
};

// Total row (or column) budget multiplier: the large, degree, and pair
// stages spend 1, 1, and C_budget of epsilon*n each, plus 2 for the small
// stage. Reported masks are measured against C_total(cfg)*epsilon*n.
double C_total(const RegConfig& cfg);

enum class Model { upper, iid, symmetric };

struct RegularizationReport {
    Model model = Model::upper;
    std::vector<StageMask> stage_masks;
    SubmatrixMask final_mask;
    double norm_before = 0.0;
    double norm_after = 0.0;
    double norm_2inf_small_after = 0.0;
    double empirical_constant = 0.0;  // norm_after / sqrt(n/epsilon)
    double mu_star = 0.0;             // winning mean shift of the column stage
    bool ok = true;
    std::vector<std::pair<std::string, double>> timings_ms;
};

// Strictly upper triangular input: bucket the entries, run the three
// non-small handlers, then regularize the small bucket's columns and (via
// the anti-transpose reflection) its rows.
RegularizationReport regularize_upper(const DenseMatrix& T, const RegConfig& cfg);

// Square i.i.d. input: both triangles are reduced to the upper model (the
// lower one by transposition, swapping its mask sides on the way back) and
// diagonal entries above l_thr are masked on both sides.
RegularizationReport regularize_iid(const DenseMatrix& A, const RegConfig& cfg);

// Symmetric input: one upper run on the strict upper part; the final mask
// is the symmetrized union, so the mirrored block goes too.
RegularizationReport regularize_symmetric(const DenseMatrix& A, const RegConfig& cfg);

// Post-hoc checks of a produced mask against its input.
struct VerificationRecord {
    double norm_before = 0.0;
    double norm_after = 0.0;
    index_t mask_rows = 0;
    index_t mask_cols = 0;
    double budget = 0.0;      // C_total * epsilon * n
    bool budget_ok = true;
    bool monotone_ok = true;     // zeroing never increased the estimate
    bool combination_ok = true;  // block removal vs rows-only + cols-only
    bool ok = true;
};

VerificationRecord verify(const DenseMatrix& A, const SubmatrixMask& mask,
                          const RegConfig& cfg);

} // namespace normreg
