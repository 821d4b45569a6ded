#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "normreg/pipeline.hpp"
#include "normreg/sampling.hpp"

namespace normreg {

/// A grid of experiment cells: every combination of model, distribution,
/// size, and epsilon, with `trials` independent matrices per cell. Trial
/// seeds are `base_seed` plus the flat (cell, trial) index, so any single
/// trial can be reproduced in isolation.
struct SweepSpec {
    std::vector<Model> models;
    std::vector<SamplerSpec> distributions;
    std::vector<index_t> sizes;
    std::vector<double> epsilons;
    int trials = 1;
    std::uint64_t base_seed = 1;
    bool include_timing = false;
    std::string output;
};

/// Parse a key=value sweep description ('#' starts a comment):
///   models=iid,symmetric
///   dists=gaussian,pareto_sym:2.5
///   sizes=256,512
///   eps=0.1
///   trials=5        (optional, default 1)
///   seed=1          (optional, default 1)
///   timing=0        (optional, default 0)
///   output=out.csv  (optional)
SweepSpec parse_sweep_spec(const std::string& text);

/// Run every trial (sample, regularize, verify) and return the result table
/// as CSV text. Rows appear in flat (cell, trial) order no matter how many
/// worker threads ran them; with timing off the output is byte-determined
/// by the spec alone. NORMREG_THREADS caps the worker count.
std::string run_sweep(const SweepSpec& spec);
std::string run_sweep(const SweepSpec& spec, const RegConfig& base_cfg);

/// Column header of the sweep CSV.
const char* sweep_csv_header();

} // namespace normreg
