#pragma once

#include "normreg/matrix.hpp"

namespace normreg {

/// Result of a power-iteration norm estimate. value is always a valid
/// lower bound on the largest singular value (it is ||A v|| for a unit v).
struct NormEstimate {
    double value = 0.0;
    bool converged = false;
};

/// Maximum Euclidean row norm, max_i ||row_i||_2. Exact up to rounding.
double norm_2_to_inf(const DenseMatrix& A);

/// Deterministic power iteration on the Gram operator, iterating on the
/// smaller of the two dimensions. Start vector is the normalized all-ones
/// vector; if the Rayleigh value stalls below (max row norm)/sqrt(dim) or
/// the iterate is annihilated, a unit-basis perturbation is added once and
/// iteration resumes. Identical inputs give bit-identical outputs.
NormEstimate op_norm_estimate(const DenseMatrix& A,
                              double rel_tol = 1e-9,
                              index_t max_iters = 10000);

/// Exact max over sign vectors x in {-1,+1}^cols of ||A x||_2, by Gray-code
/// enumeration with x_0 = +1 fixed. Requires cols <= 20.
double norm_inf_to_2_bruteforce(const DenseMatrix& A);

/// Schur test value sqrt(max row l1 * max col l1); upper bound on ||A||.
double schur_bound(const DenseMatrix& A);

} // namespace normreg
