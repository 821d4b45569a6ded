#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "normreg/matrix.hpp"
#include "normreg/pipeline.hpp"

namespace normreg {

/// Entry laws available to the experiment harness. All built-in laws are
/// centered and have unit variance, so matrix norms are comparable across
/// them without per-law rescaling.
enum class Law {
    gaussian,
    rademacher,
    three_point,
    pareto_sym,
    table,
};

/// A reproducible entry distribution. `eps_prime` parameterizes the sparse
/// three-point law, `alpha` the symmetric Pareto tail, and `table` holds
/// (value, probability) pairs for a finitely supported law. Fields that do
/// not apply to `kind` are ignored.
struct SamplerSpec {
    Law kind = Law::gaussian;
    double eps_prime = 0.1;
    double alpha = 2.5;
    std::vector<std::pair<double, double>> table;
    std::uint64_t seed = 0;
};

/// One draw of the law for the logical position (i, j) of an n x n matrix.
/// Deterministic in (spec.seed, i, j) alone; n only scales the sparse law.
double sample_entry(const SamplerSpec& spec, index_t n, index_t i, index_t j);

/// Fill an n x n matrix according to `model`: `iid` draws every position,
/// `upper` draws the strict upper triangle and leaves the rest zero, and
/// `symmetric` mirrors the strict upper triangle with a zero diagonal.
/// Requires n >= 2; the three-point law additionally requires n > 2 eps'.
DenseMatrix sample_matrix(const SamplerSpec& spec, index_t n, Model model);

/// Empirical mean and variance of `count` scalar draws, for moment checks.
/// `n` plays the same scaling role as in sample_matrix.
struct MomentEstimate {
    double mean = 0.0;
    double variance = 0.0;
};
MomentEstimate sample_moments(const SamplerSpec& spec, index_t n, std::int64_t count);

/// Parse "gaussian", "three_point:0.05", "pareto_sym:3",
/// "table:v:p;v:p;...". The numeric suffix is optional where a default
/// exists. Throws ParameterError on anything else.
SamplerSpec parse_sampler(const std::string& text);

/// Canonical text form, inverse of parse_sampler for built-in laws.
std::string sampler_name(const SamplerSpec& spec);

const char* model_name(Model model);
Model parse_model(const std::string& text);

} // namespace normreg
