#include "normreg/damping.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace normreg {

DampingPlan build_quantile_ladder(const std::vector<double>& samples, double epsilon,
                                  index_t n_ref, double L_damp) {
    if (!(epsilon > 0.0) || epsilon > 0.5)
        throw ParameterError("build_quantile_ladder: epsilon outside (0, 1/2]");
    if (samples.empty()) throw ParameterError("build_quantile_ladder: no samples");
    if (n_ref < 1) throw ParameterError("build_quantile_ladder: n_ref must be >= 1");
    if (L_damp < 1.0) throw ParameterError("build_quantile_ladder: L_damp must be >= 1");

    DampingPlan plan;
    plan.K = 1.0 / std::log(1.0 / epsilon);
    plan.L_damp = L_damp;
    plan.n_ref = n_ref;
    const double kn = plan.K * static_cast<double>(n_ref);
    plan.t = std::max<index_t>(1, static_cast<index_t>(std::ceil(std::log2(kn))) + 1);

    std::vector<double> y = samples;
    std::sort(y.begin(), y.end(), std::greater<>());
    const double m = static_cast<double>(y.size());

    plan.qhat.assign(static_cast<std::size_t>(plan.t) + 2, 0.0);
    for (index_t k = 1; k <= plan.t; ++k) {
        // s-th largest order statistic, s = ceil(m 2^{-k}); beyond the
        // sample count the empirical tail is empty and the quantile is 0
        const auto s = static_cast<std::size_t>(std::ceil(std::ldexp(m, -static_cast<int>(k))));
        if (s >= 1 && s <= y.size()) plan.qhat[static_cast<std::size_t>(k)] = y[s - 1];
    }
    plan.qhat[static_cast<std::size_t>(plan.t) + 1] = 2.0 * plan.K * static_cast<double>(n_ref);

    plan.blocks.push_back(0);
    while (plan.blocks.back() != plan.t + 1) {
        const index_t ki = plan.blocks.back();
        const double gate = 2.0 * plan.qhat[static_cast<std::size_t>(ki)];
        index_t next = ki + 1;
        for (index_t j = plan.t + 1; j > ki; --j) {
            if (plan.qhat[static_cast<std::size_t>(j)] < gate) {
                next = std::max(next, j);
                break;
            }
        }
        plan.blocks.push_back(next);
    }
    return plan;
}

RowWeights damp_row(const std::vector<double>& X, const DampingPlan& plan) {
    const std::size_t nblocks = plan.blocks.size() - 1;
    const std::size_t n = X.size();

    std::vector<double> start(plan.blocks.size());
    for (std::size_t i = 0; i < plan.blocks.size(); ++i)
        start[i] = plan.qhat[static_cast<std::size_t>(plan.blocks[i])];

    RowWeights rw;
    rw.block_of.resize(n);
    rw.nu.assign(nblocks, 0);
    rw.W.resize(n);

    for (std::size_t j = 0; j < n; ++j) {
        // First block whose half-open interval holds X_j. A value equal to
        // a run of tied thresholds joins the first block of the run, and a
        // value at or above the cap clamps into the top block.
        const double x = X[j];
        std::size_t b = nblocks - 1;
        for (std::size_t i = 0; i < nblocks; ++i) {
            if (start[i] <= x && (x < start[i + 1] || (x == start[i] && start[i] == start[i + 1]))) {
                b = i;
                break;
            }
        }
        rw.block_of[j] = static_cast<index_t>(b);
        ++rw.nu[b];
    }

    std::vector<double> w(nblocks, 1.0);
    for (std::size_t i = 0; i < nblocks; ++i) {
        if (rw.nu[i] == 0) continue;
        const double cap = plan.L_damp *
                           std::ldexp(static_cast<double>(n), -static_cast<int>(plan.blocks[i])) /
                           static_cast<double>(rw.nu[i]);
        w[i] = std::min(1.0, cap);
    }
    for (std::size_t j = 0; j < n; ++j) rw.W[j] = w[static_cast<std::size_t>(rw.block_of[j])];
    return rw;
}

ColumnProducts column_products(const DenseMatrix& M, const DampingPlan& plan) {
    const index_t rows = M.rows(), cols = M.cols();
    std::vector<double> logv(static_cast<std::size_t>(cols), 0.0);
    std::vector<double> X(static_cast<std::size_t>(cols));
    for (index_t i = 0; i < rows; ++i) {
        for (index_t j = 0; j < cols; ++j) X[static_cast<std::size_t>(j)] = M(i, j) * M(i, j);
        const RowWeights rw = damp_row(X, plan);
        for (index_t j = 0; j < cols; ++j)
            logv[static_cast<std::size_t>(j)] += std::log(rw.W[static_cast<std::size_t>(j)]);
    }
    ColumnProducts cp;
    cp.V.resize(static_cast<std::size_t>(cols));
    std::vector<index_t> J;
    for (index_t j = 0; j < cols; ++j) {
        cp.V[static_cast<std::size_t>(j)] = std::exp(logv[static_cast<std::size_t>(j)]);
        if (logv[static_cast<std::size_t>(j)] < -2.0) J.push_back(j);
    }
    cp.J = IndexSet::of(std::move(J), cols);
    return cp;
}

SmallColumnResult regularize_small_columns(const DenseMatrix& T, double epsilon,
                                           double L_damp) {
    if (T.rows() != T.cols())
        throw ContractError("regularize_small_columns: square input required");
    if (!T.is_strictly_upper_triangular())
        throw ContractError("regularize_small_columns: strictly upper triangular input required");
    if (!(epsilon > 0.0) || epsilon > 0.5)
        throw ParameterError("regularize_small_columns: epsilon outside (0, 1/2]");

    const index_t n = T.rows();
    SmallColumnResult out;
    if (n == 0) {
        out.J0 = IndexSet::empty_set(0);
        return out;
    }

    const index_t np = (n % 2 == 0) ? n : n + 1;
    const index_t half = np / 2;

    // index n (if padded) reads as a zero row/column
    auto T_at = [&](index_t i, index_t j) -> double {
        return (i < n && j < n) ? T(i, j) : 0.0;
    };

    // Interleave T into two half-size squares: N is the upper-right block,
    // Np folds the upper-left strict triangle (reversed) together with the
    // lower-right strict triangle; its last row has no source and is zero.
    DenseMatrix N(half, half), Np(half, half);
    for (index_t i = 0; i < half; ++i)
        for (index_t j = 0; j < half; ++j) N(i, j) = T_at(i, half + j);
    for (index_t i = 0; i + 1 < half; ++i)
        for (index_t j = 0; j < half; ++j)
            Np(i, j) = (j > i) ? T_at(i + half, j + half) : T_at(half - i - 2, half - j - 1);

    // Each half is damped against a ladder estimated from the other half.
    std::vector<double> sampN;
    sampN.reserve(static_cast<std::size_t>((half - 1) * half));
    for (index_t i = 0; i + 1 < half; ++i)
        for (index_t j = 0; j < half; ++j) sampN.push_back(Np(i, j) * Np(i, j));
    std::vector<double> sampNp;
    sampNp.reserve(static_cast<std::size_t>(half * half));
    for (index_t i = 0; i < half; ++i)
        for (index_t j = 0; j < half; ++j) sampNp.push_back(N(i, j) * N(i, j));
    if (sampN.empty()) sampN.push_back(0.0);

    const DampingPlan planN = build_quantile_ladder(sampN, epsilon, n, L_damp);
    const DampingPlan planNp = build_quantile_ladder(sampNp, epsilon, n, L_damp);

    std::vector<double> logvN(static_cast<std::size_t>(half), 0.0);
    std::vector<double> logvNp(static_cast<std::size_t>(half), 0.0);
    std::vector<double> dampN(static_cast<std::size_t>(half), 0.0);
    std::vector<double> dampNpLow(static_cast<std::size_t>(half), 0.0);
    std::vector<double> dampNpHigh(static_cast<std::size_t>(half), 0.0);
    std::vector<double> X(static_cast<std::size_t>(half));

    for (index_t i = 0; i < half; ++i) {
        for (index_t j = 0; j < half; ++j) X[static_cast<std::size_t>(j)] = N(i, j) * N(i, j);
        const RowWeights rw = damp_row(X, planN);
        double acc = 0.0;
        for (index_t j = 0; j < half; ++j) {
            logvN[static_cast<std::size_t>(j)] += std::log(rw.W[static_cast<std::size_t>(j)]);
            acc += rw.W[static_cast<std::size_t>(j)] * X[static_cast<std::size_t>(j)];
        }
        dampN[static_cast<std::size_t>(i)] = acc;
    }
    for (index_t i = 0; i < half; ++i) {
        for (index_t j = 0; j < half; ++j) X[static_cast<std::size_t>(j)] = Np(i, j) * Np(i, j);
        const RowWeights rw = damp_row(X, planNp);
        for (index_t j = 0; j < half; ++j) {
            logvNp[static_cast<std::size_t>(j)] += std::log(rw.W[static_cast<std::size_t>(j)]);
            const double dm = rw.W[static_cast<std::size_t>(j)] * X[static_cast<std::size_t>(j)];
            if (j > i)
                dampNpHigh[static_cast<std::size_t>(i)] += dm;
            else
                dampNpLow[static_cast<std::size_t>(i)] += dm;
        }
    }

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    std::vector<index_t> j0;
    for (index_t j = 0; j < half; ++j) {
        const double lvN = logvN[static_cast<std::size_t>(j)];
        const double lvNp = logvNp[static_cast<std::size_t>(j)];
        for (double lv : {lvN, lvNp}) {
            const double v = std::exp(lv);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        if ((lvN < -2.0 || lvNp < -2.0) && half + j < n) j0.push_back(half + j);
        if (lvNp < -2.0) j0.push_back(half - j - 1);
    }
    out.J0 = IndexSet::of(std::move(j0), n);

    out.diag.j0_size = out.J0.size();
    out.diag.v_min = vmin;
    out.diag.v_max = vmax;

    // Residual mass outside the removed columns must be within e^2 of the
    // damped mass on every row; kept columns have weight product >= e^{-2},
    // so each of their row weights does too. A violation is a defect.
    const auto keep = out.J0.complement().bitmap();
    const double e2 = std::exp(2.0);
    for (index_t a = 0; a < n; ++a) {
        double res = 0.0;
        const double* row = T.row_ptr(a);
        for (index_t c = 0; c < n; ++c)
            if (keep[static_cast<std::size_t>(c)]) res += row[c] * row[c];

        double damped = 0.0;
        if (a < half - 1)
            damped = dampN[static_cast<std::size_t>(a)] +
                     dampNpLow[static_cast<std::size_t>(half - a - 2)];
        else if (a == half - 1)
            damped = dampN[static_cast<std::size_t>(a)];
        else
            damped = dampNpHigh[static_cast<std::size_t>(a - half)];

        out.diag.max_row_residual = std::max(out.diag.max_row_residual, res);
        out.diag.max_row_damped = std::max(out.diag.max_row_damped, damped);
        if (res > e2 * damped * (1.0 + 1e-9))
            throw ContractError("regularize_small_columns: residual mass exceeds damped bound");
    }
    return out;
}

} // namespace normreg
