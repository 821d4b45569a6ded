#include "normreg/gpselect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kernels.hpp"
#include "normreg/norms.hpp"

namespace normreg {

namespace {

void validate(const GPConfig& cfg) {
    if (!(cfg.delta > 0.0) || cfg.delta >= 1.0)
        throw ParameterError("gp_column_select: delta outside (0, 1)");
    if (cfg.mw_iters < 0) throw ParameterError("gp_column_select: negative mw_iters");
    if (!(cfg.mw_step > 0.0)) throw ParameterError("gp_column_select: mw_step must be positive");
    if (!(cfg.power_tol > 0.0)) throw ParameterError("gp_column_select: power_tol must be positive");
}

struct PowerScratch {
    std::vector<double> t;  // B * (d .* x)
    std::vector<double> y;  // B^T t, then scaled by d
    std::vector<double> z;  // d .* x
};

// Top right singular direction of B*diag(d) by Gram power iteration,
// warm-started from x (overwritten in place). d carries mu^{-1/2}.
void top_direction(const DenseMatrix& B, const std::vector<double>& d, std::vector<double>& x,
                   double tol, int max_steps, PowerScratch& ps) {
    const index_t k = B.rows(), m = B.cols();
    ps.t.resize(static_cast<std::size_t>(k));
    ps.y.resize(static_cast<std::size_t>(m));
    ps.z.resize(static_cast<std::size_t>(m));
    std::vector<double>& t = ps.t;
    std::vector<double>& y = ps.y;
    std::vector<double>& z = ps.z;

    for (int step = 0; step < max_steps; ++step) {
        for (index_t j = 0; j < m; ++j)
            z[static_cast<std::size_t>(j)] =
                d[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        for (index_t i = 0; i < k; ++i)
            t[static_cast<std::size_t>(i)] = detail::dot(B.row_ptr(i), z.data(), m);
        std::fill(y.begin(), y.end(), 0.0);
        for (index_t i = 0; i < k; ++i) {
            const double ti = t[static_cast<std::size_t>(i)];
            if (ti == 0.0) continue;
            detail::axpy(y.data(), ti, B.row_ptr(i), m);
        }
        double nY = 0.0;
        for (index_t j = 0; j < m; ++j) {
            y[static_cast<std::size_t>(j)] *= d[static_cast<std::size_t>(j)];
            nY += y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
        }
        nY = std::sqrt(nY);
        if (nY == 0.0) return;  // x is annihilated; keep the current direction

        double diff = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double v = y[j] / nY;
            const double dv = v - x[j];
            diff += dv * dv;
            x[j] = v;
        }
        if (std::sqrt(diff) < tol) return;
    }
}

struct SelectOutcome {
    std::vector<double> mu;
    std::vector<index_t> J;
};

// The multiplicative-weights game plus the threshold-and-cap selection.
// cfg must already be validated and B must have at least one column. The
// direction x persists across calls on nearby matrices once warm is set;
// first_steps/tail_steps budget the inner power bursts.
SelectOutcome run_select(const DenseMatrix& B, const GPConfig& cfg, std::vector<double>& x,
                         bool& warm, int first_steps, int tail_steps) {
    const index_t m = B.cols();
    SelectOutcome out;
    out.mu.assign(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));
    if (B.is_zero()) return out;

    std::vector<double>& mu = out.mu;
    std::vector<double> d(static_cast<std::size_t>(m));
    if (!warm || x.size() != static_cast<std::size_t>(m))
        x.assign(static_cast<std::size_t>(m), 1.0 / std::sqrt(static_cast<double>(m)));
    PowerScratch ps;

    for (index_t iter = 0; iter < cfg.mw_iters; ++iter) {
        for (std::size_t j = 0; j < mu.size(); ++j)
            d[j] = mu[j] > 0.0 ? 1.0 / std::sqrt(mu[j]) : 0.0;
        // Converge the direction once, then track it: the weights move by a
        // bounded factor per round, so a short warm-started burst keeps up.
        top_direction(B, d, x, cfg.power_tol, iter == 0 ? first_steps : tail_steps, ps);

        double xinf = 0.0;
        for (double xj : x) xinf = std::max(xinf, std::fabs(xj));
        if (xinf == 0.0) break;

        double l1_change = 0.0;
        double total = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double r = x[j] / xinf;
            d[j] = mu[j] * std::exp(cfg.mw_step * r * r);  // reuse d as scratch
            total += d[j];
        }
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double next = d[j] / total;
            l1_change += std::fabs(next - mu[j]);
            mu[j] = next;
        }
        // a fixpoint of the update cannot move again; bail out early
        if (l1_change < 1e-13) break;
    }

    const double dm = cfg.delta * static_cast<double>(m);
    const double threshold = 1.0 / dm;
    for (index_t j = 0; j < m; ++j)
        if (mu[static_cast<std::size_t>(j)] > threshold) out.J.push_back(j);
    std::sort(out.J.begin(), out.J.end(), [&](index_t a, index_t b) {
        const double wa = mu[static_cast<std::size_t>(a)];
        const double wb = mu[static_cast<std::size_t>(b)];
        return wa != wb ? wa > wb : a < b;
    });
    const auto cap = static_cast<std::size_t>(std::ceil(dm));
    if (out.J.size() > cap) out.J.resize(cap);
    warm = true;
    return out;
}

} // namespace

GPResult gp_column_select(const DenseMatrix& B, const GPConfig& cfg) {
    validate(cfg);
    const index_t m = B.cols();
    if (m < 1) throw ParameterError("gp_column_select: at least one column required");

    std::vector<double> x;
    bool warm = false;
    SelectOutcome sel = run_select(B, cfg, x, warm, 200, 2);
    GPResult out;
    out.weights = std::move(sel.mu);
    out.J = IndexSet::of(std::move(sel.J), m);
    out.achieved_norm =
        B.is_zero() ? 0.0
                    : op_norm_estimate(restrict_columns(B, out.J.complement())).value;
    return out;
}

MeanGridResult mean_grid_select(const DenseMatrix& S, const IndexSet& J0, double epsilon,
                                const GPConfig& cfg) {
    validate(cfg);
    if (!(epsilon > 0.0) || epsilon > 0.5)
        throw ParameterError("mean_grid_select: epsilon outside (0, 1/2]");
    if (J0.bound() != S.cols())
        throw DimensionError("mean_grid_select: J0 bound does not match S");

    const index_t n = S.cols();
    MeanGridResult empty;
    empty.J1 = IndexSet::empty_set(n);
    if (n == 0) return empty;

    const auto radius =
        static_cast<index_t>(std::ceil(std::sqrt(std::log(1.0 / epsilon))));
    const double root_n = std::sqrt(static_cast<double>(n));

    GPConfig point_cfg = cfg;
    point_cfg.delta = epsilon;

    const IndexSet keep0 = J0.complement();
    const auto keep0_bm = keep0.bitmap();

    MeanGridResult best;
    bool have_best = false;
    index_t best_j = 0;

    // Both the game direction and the scoring direction carry over between
    // grid points; the five matrices differ only in a rank-one shift and a
    // few dropped columns, so each restart is nearly converged already.
    std::vector<double> game_x;
    bool game_warm = false;
    std::vector<double> score_v;

    for (index_t j = -radius; j <= radius; ++j) {
        const double mu = static_cast<double>(j) / root_n;
        DenseMatrix Bmu(S.rows(), S.cols());
        for (index_t r = 0; r < S.rows(); ++r) {
            const double* src = S.row_ptr(r);
            double* dst = Bmu.row_ptr(r);
            for (index_t c = 0; c < n; ++c)
                dst[c] = keep0_bm[static_cast<std::size_t>(c)] ? src[c] - mu : 0.0;
        }

        SelectOutcome sel = run_select(Bmu, point_cfg, game_x, game_warm,
                                       game_warm ? 25 : 200, 1);
        IndexSet J = IndexSet::of(std::move(sel.J), n);
        const IndexSet removed = J0.unioned(J);
        // Scored at the power tolerance; the caller re-measures whatever it
        // keeps at its own reporting tolerance.
        const double score =
            detail::power_norm(restrict_columns(S, removed.complement()), cfg.power_tol,
                               1000, &score_v)
                .value;

        // minimum by (norm, |j|, then positive over negative)
        const bool better =
            !have_best || score < best.achieved_norm ||
            (score == best.achieved_norm &&
             (std::abs(j) < std::abs(best_j) ||
              (std::abs(j) == std::abs(best_j) && j > best_j)));
        if (better) {
            have_best = true;
            best_j = j;
            best.mu_star = mu;
            best.J1 = std::move(J);
            best.achieved_norm = score;
        }
    }
    return best;
}

} // namespace normreg
