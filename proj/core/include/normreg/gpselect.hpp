#pragma once

#include <vector>

#include "normreg/matrix.hpp"

namespace normreg {

/// Knobs for the column-selection game. delta is the removable column
/// fraction; mw_iters/mw_step drive the multiplicative weight updates;
/// power_tol is the convergence tolerance of the inner singular-direction
/// iteration.
struct GPConfig {
    double delta = 0.5;
    index_t mw_iters = 200;
    double mw_step = 0.5;
    double power_tol = 1e-6;
};

struct GPResult {
    IndexSet J;
    std::vector<double> weights;
    double achieved_norm = 0.0;
};

struct MeanGridResult {
    double mu_star = 0.0;
    IndexSet J1;
    /// estimate of ||S with columns J0 and J1 zeroed||, the quantity the
    /// grid point was scored on
    double achieved_norm = 0.0;
};

/// Deterministic column selection: runs multiplicative weights over the
/// columns, each round reweighting by the top right singular direction of
/// B rescaled by diag(mu)^{-1/2}, then removes the heaviest columns above
/// the 1/(delta m) threshold, capped at ceil(delta m). The weight ranking
/// is shared across budgets, so J(delta) is nested inside J(delta') for
/// delta' > delta.
GPResult gp_column_select(const DenseMatrix& B, const GPConfig& cfg);

/// Mean-shift grid search: for each mu = j/sqrt(n) with |j| up to
/// ceil(sqrt(ln(1/epsilon))), selects columns on (S - mu*ones) with J0
/// zeroed at budget epsilon, scores the UN-shifted S with columns J0+J
/// zeroed, and keeps the minimizer (ties: smaller |j|, then positive j).
MeanGridResult mean_grid_select(const DenseMatrix& S, const IndexSet& J0, double epsilon,
                                const GPConfig& cfg);

} // namespace normreg
