#include "normreg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "normreg/damping.hpp"
#include "normreg/errors.hpp"
#include "normreg/norms.hpp"

namespace normreg {

namespace {

using sclock = std::chrono::steady_clock;

double ms_between(sclock::time_point a, sclock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

void check_cfg(const RegConfig& cfg) {
    if (!(cfg.epsilon > 0.0) || cfg.epsilon > 0.5)
        throw ParameterError("pipeline: epsilon outside (0, 1/2]");
    if (!(cfg.L_damp > 0.0)) throw ParameterError("pipeline: L_damp must be positive");
    if (!(cfg.deg_mult > 0.0)) throw ParameterError("pipeline: deg_mult must be positive");
    if (!(cfg.C_budget > 0.0)) throw ParameterError("pipeline: C_budget must be positive");
    if (!(cfg.norm_tol > 0.0)) throw ParameterError("pipeline: norm_tol must be positive");
}

struct SmallOutcome {
    IndexSet J;       // J0 union J1, in the frame of the matrix it was run on
    index_t j0 = 0;
    index_t j1 = 0;
    double mu_star = 0.0;
};

SmallOutcome run_small(const DenseMatrix& S, const RegConfig& cfg) {
    SmallOutcome out;
    const SmallColumnResult damped = regularize_small_columns(S, cfg.epsilon, cfg.L_damp);
    const MeanGridResult grid = mean_grid_select(S, damped.J0, cfg.epsilon, cfg.gp);
    out.j0 = damped.J0.size();
    out.j1 = grid.J1.size();
    out.J = damped.J0.unioned(grid.J1);
    out.mu_star = grid.mu_star;
    return out;
}

StageMask small_stage_mask(const SmallOutcome& sm, Stage tag, const IndexSet& as_rows,
                           const IndexSet& as_cols, double epsilon, index_t n) {
    StageMask out;
    out.stage = tag;
    out.mask.rows = as_rows;
    out.mask.cols = as_cols;
    out.count = sm.J.size();
    const double en = epsilon * static_cast<double>(n);
    out.budget = 2.0 * en + std::ceil(en);
    out.ok = static_cast<double>(sm.j0) <= 2.0 * en &&
             static_cast<double>(sm.j1) <= std::ceil(en);
    return out;
}

// Entries of A at or below the small cutoff, over the whole shape.
DenseMatrix small_part(const DenseMatrix& A, double s_thr) {
    DenseMatrix out(A.rows(), A.cols());
    for (index_t i = 0; i < A.rows(); ++i) {
        const double* src = A.row_ptr(i);
        double* dst = out.row_ptr(i);
        for (index_t j = 0; j < A.cols(); ++j)
            dst[j] = std::fabs(src[j]) <= s_thr ? src[j] : 0.0;
    }
    return out;
}

IndexSet large_diagonal(const DenseMatrix& A, double l_thr) {
    std::vector<index_t> idx;
    for (index_t i = 0; i < A.rows(); ++i)
        if (std::fabs(A(i, i)) > l_thr) idx.push_back(i);
    return IndexSet::of(std::move(idx), A.rows());
}

StageMask diagonal_stage(const IndexSet& D, double epsilon, index_t n) {
    StageMask out;
    out.stage = Stage::L;
    out.mask.rows = D;
    out.mask.cols = D;
    out.count = D.size();
    out.budget = std::floor(epsilon * static_cast<double>(n));
    out.ok = static_cast<double>(out.count) <= out.budget;
    return out;
}

bool all_ok(const std::vector<StageMask>& stages) {
    for (const StageMask& s : stages)
        if (!s.ok) return false;
    return true;
}

// The shared upper-triangular run. Norm reporting is skipped when the run
// is embedded in a larger model that measures its own input instead.
RegularizationReport upper_core(const DenseMatrix& T, const RegConfig& cfg, bool with_norms) {
    check_cfg(cfg);
    if (!T.is_strictly_upper_triangular())
        throw ContractError("regularize_upper: strictly upper triangular input required");
    const index_t n = T.rows();

    RegularizationReport rep;
    rep.model = Model::upper;

    auto t0 = sclock::now();
    auto tick = [&](const char* label) {
        const auto t1 = sclock::now();
        rep.timings_ms.emplace_back(label, ms_between(t0, t1));
        t0 = t1;
    };

    BucketDecomposition bd = decompose(T, cfg.epsilon);
    tick("decompose");

    StageMask large = handle_L(bd.L, cfg.epsilon);
    bd.L = DenseMatrix();
    tick("large");

    StageMask degree = handle_M1(bd.M1, cfg.epsilon, cfg.deg_mult);
    bd.M1 = DenseMatrix();
    tick("degree");

    StageMask pairs = handle_M2(bd.M2, cfg.epsilon, cfg.C_budget);
    bd.M2 = DenseMatrix();
    tick("pairs");

    const SmallOutcome cols = run_small(bd.S, cfg);
    StageMask s_cols = small_stage_mask(cols, Stage::SCols, IndexSet::empty_set(n), cols.J,
                                        cfg.epsilon, n);
    tick("small-cols");

    // The reflection maps strict upper to strict upper; a selected column c
    // of the reflected matrix is row n-1-c of the original.
    SmallOutcome rows;
    {
        const DenseMatrix Sr = anti_transpose(bd.S);
        rows = run_small(Sr, cfg);
    }
    std::vector<index_t> k_rows;
    for (index_t c : rows.J.indices()) k_rows.push_back(n - 1 - c);
    const IndexSet K = IndexSet::of(std::move(k_rows), n);
    StageMask s_rows =
        small_stage_mask(rows, Stage::SRows, K, IndexSet::empty_set(n), cfg.epsilon, n);
    tick("small-rows");

    rep.final_mask.rows =
        large.mask.rows.unioned(degree.mask.rows).unioned(pairs.mask.rows).unioned(K);
    rep.final_mask.cols =
        large.mask.cols.unioned(degree.mask.cols).unioned(pairs.mask.cols).unioned(cols.J);
    rep.mu_star = cols.mu_star;

    rep.stage_masks.push_back(std::move(large));
    rep.stage_masks.push_back(std::move(degree));
    rep.stage_masks.push_back(std::move(pairs));
    rep.stage_masks.push_back(std::move(s_cols));
    rep.stage_masks.push_back(std::move(s_rows));
    rep.ok = all_ok(rep.stage_masks);

    if (with_norms) {
        rep.norm_before = op_norm_estimate(T, cfg.norm_tol).value;
        rep.norm_after = op_norm_estimate(zero_block(T, rep.final_mask), cfg.norm_tol).value;
        rep.norm_2inf_small_after = norm_2_to_inf(zero_block(bd.S, rep.final_mask));
        if (n > 0)
            rep.empirical_constant =
                rep.norm_after / std::sqrt(static_cast<double>(n) / cfg.epsilon);
        tick("norms");
    }
    return rep;
}

StageMask swap_sides(StageMask sm) {
    std::swap(sm.mask.rows, sm.mask.cols);
    return sm;
}

} // namespace

double C_total(const RegConfig& cfg) { return 4.0 + cfg.C_budget; }

RegularizationReport regularize_upper(const DenseMatrix& T, const RegConfig& cfg) {
    return upper_core(T, cfg, true);
}

RegularizationReport regularize_iid(const DenseMatrix& A, const RegConfig& cfg) {
    check_cfg(cfg);
    if (A.rows() != A.cols()) throw DimensionError("regularize_iid: square matrix required");
    const index_t n = A.rows();

    RegularizationReport rep;
    rep.model = Model::iid;

    auto t0 = sclock::now();
    auto tick = [&](const char* label) {
        const auto t1 = sclock::now();
        rep.timings_ms.emplace_back(label, ms_between(t0, t1));
        t0 = t1;
    };

    DenseMatrix Tup(n, n), Tlow(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = i + 1; j < n; ++j) {
            Tup(i, j) = A(i, j);
            Tlow(i, j) = A(j, i);
        }
    }

    RegularizationReport up = upper_core(Tup, cfg, false);
    Tup = DenseMatrix();
    tick("upper");

    // The lower triangle rides through a transpose, so its mask's sides
    // swap coming back.
    RegularizationReport low = upper_core(Tlow, cfg, false);
    Tlow = DenseMatrix();
    tick("lower");

    const double l_thr = bucket_thresholds(n, cfg.epsilon).l_thr;
    const IndexSet D = large_diagonal(A, l_thr);
    const StageMask diag = diagonal_stage(D, cfg.epsilon, n);
    tick("diagonal");

    rep.final_mask.rows = up.final_mask.rows.unioned(low.final_mask.cols).unioned(D);
    rep.final_mask.cols = up.final_mask.cols.unioned(low.final_mask.rows).unioned(D);
    rep.mu_star = up.mu_star;

    for (StageMask& sm : up.stage_masks) rep.stage_masks.push_back(std::move(sm));
    for (StageMask& sm : low.stage_masks) rep.stage_masks.push_back(swap_sides(std::move(sm)));
    rep.stage_masks.push_back(diag);
    rep.ok = all_ok(rep.stage_masks);

    rep.norm_before = op_norm_estimate(A, cfg.norm_tol).value;
    rep.norm_after = op_norm_estimate(zero_block(A, rep.final_mask), cfg.norm_tol).value;
    const double s_thr = bucket_thresholds(n, cfg.epsilon).s_thr;
    rep.norm_2inf_small_after = norm_2_to_inf(zero_block(small_part(A, s_thr), rep.final_mask));
    if (n > 0)
        rep.empirical_constant =
            rep.norm_after / std::sqrt(static_cast<double>(n) / cfg.epsilon);
    tick("norms");
    return rep;
}

RegularizationReport regularize_symmetric(const DenseMatrix& A, const RegConfig& cfg) {
    check_cfg(cfg);
    if (A.rows() != A.cols()) throw DimensionError("regularize_symmetric: square matrix required");
    if (!A.is_symmetric()) throw ContractError("regularize_symmetric: symmetric input required");
    const index_t n = A.rows();

    RegularizationReport rep;
    rep.model = Model::symmetric;

    auto t0 = sclock::now();
    auto tick = [&](const char* label) {
        const auto t1 = sclock::now();
        rep.timings_ms.emplace_back(label, ms_between(t0, t1));
        t0 = t1;
    };

    DenseMatrix T(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j) T(i, j) = A(i, j);

    RegularizationReport up = upper_core(T, cfg, false);
    T = DenseMatrix();
    tick("upper");

    const double l_thr = bucket_thresholds(n, cfg.epsilon).l_thr;
    const IndexSet D = large_diagonal(A, l_thr);
    const StageMask diag = diagonal_stage(D, cfg.epsilon, n);
    tick("diagonal");

    // One symmetric index set: zeroing rows and columns of the same set
    // also wipes the mirror of everything the upper run flagged.
    const IndexSet both =
        up.final_mask.rows.unioned(up.final_mask.cols).unioned(D);
    rep.final_mask.rows = both;
    rep.final_mask.cols = both;
    rep.mu_star = up.mu_star;

    for (StageMask& sm : up.stage_masks) rep.stage_masks.push_back(std::move(sm));
    rep.stage_masks.push_back(diag);
    rep.ok = all_ok(rep.stage_masks);

    rep.norm_before = op_norm_estimate(A, cfg.norm_tol).value;
    rep.norm_after = op_norm_estimate(zero_block(A, rep.final_mask), cfg.norm_tol).value;
    const double s_thr = bucket_thresholds(n, cfg.epsilon).s_thr;
    rep.norm_2inf_small_after = norm_2_to_inf(zero_block(small_part(A, s_thr), rep.final_mask));
    if (n > 0)
        rep.empirical_constant =
            rep.norm_after / std::sqrt(static_cast<double>(n) / cfg.epsilon);
    tick("norms");
    return rep;
}

VerificationRecord verify(const DenseMatrix& A, const SubmatrixMask& mask,
                          const RegConfig& cfg) {
    check_cfg(cfg);
    if (mask.rows.bound() != A.rows() || mask.cols.bound() != A.cols())
        throw DimensionError("verify: mask bounds do not match the matrix");

    VerificationRecord rec;
    rec.mask_rows = mask.rows.size();
    rec.mask_cols = mask.cols.size();

    rec.norm_before = op_norm_estimate(A, cfg.norm_tol).value;
    rec.norm_after = op_norm_estimate(zero_block(A, mask), cfg.norm_tol).value;

    const double ct = C_total(cfg);
    rec.budget = ct * cfg.epsilon * static_cast<double>(A.rows());
    rec.budget_ok =
        static_cast<double>(rec.mask_rows) <= ct * cfg.epsilon * static_cast<double>(A.rows()) &&
        static_cast<double>(rec.mask_cols) <= ct * cfg.epsilon * static_cast<double>(A.cols());

    // Estimator slack scales with the value; the exact quantities obey the
    // inequalities with no slack at all.
    const double slack = 2.0 * std::max(cfg.norm_tol, 1e-7) * std::max(1.0, rec.norm_before);
    rec.monotone_ok = rec.norm_after <= rec.norm_before + slack;

    SubmatrixMask rows_only;
    rows_only.rows = mask.rows;
    rows_only.cols = IndexSet::all(A.cols());
    SubmatrixMask cols_only;
    cols_only.rows = IndexSet::all(A.rows());
    cols_only.cols = mask.cols;
    const double rows_norm = op_norm_estimate(zero_block(A, rows_only), cfg.norm_tol).value;
    const double cols_norm = op_norm_estimate(zero_block(A, cols_only), cfg.norm_tol).value;
    rec.combination_ok = rec.norm_after <= rows_norm + cols_norm + slack;

    rec.ok = rec.budget_ok && rec.monotone_ok && rec.combination_ok;
    return rec;
}

} // namespace normreg
