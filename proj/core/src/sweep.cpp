#include "normreg/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "normreg/errors.hpp"
#include "textfmt.hpp"

namespace normreg {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

int thread_cap() {
    if (const char* env = std::getenv("NORMREG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            return static_cast<int>(v > 1024 ? 1024 : v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct Cell {
    Model model;
    const SamplerSpec* dist;
    index_t n;
    double epsilon;
};

std::string run_trial(const Cell& cell, int trial, std::uint64_t seed,
                      const RegConfig& base_cfg, bool include_timing) {
    const auto t0 = std::chrono::steady_clock::now();

    SamplerSpec draw = *cell.dist;
    draw.seed = seed;
    const DenseMatrix a = sample_matrix(draw, cell.n, cell.model);

    RegConfig cfg = base_cfg;
    cfg.epsilon = cell.epsilon;
    RegularizationReport report;
    switch (cell.model) {
    case Model::upper:
        report = regularize_upper(a, cfg);
        break;
    case Model::iid:
        report = regularize_iid(a, cfg);
        break;
    case Model::symmetric:
        report = regularize_symmetric(a, cfg);
        break;
    }
    const VerificationRecord rec = verify(a, report.final_mask, cfg);

    const double ms =
        include_timing
            ? std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count()
            : 0.0;

    std::string row;
    row += model_name(cell.model);
    row += ',';
    row += sampler_name(*cell.dist);
    row += ',';
    row += std::to_string(cell.n);
    row += ',';
    row += detail::fmt_short(cell.epsilon);
    row += ',';
    row += std::to_string(trial);
    row += ',';
    row += detail::fmt17(report.norm_before);
    row += ',';
    row += detail::fmt17(report.norm_after);
    row += ',';
    row += detail::fmt17(report.empirical_constant);
    row += ',';
    row += std::to_string(report.final_mask.rows.size());
    row += ',';
    row += std::to_string(report.final_mask.cols.size());
    row += ',';
    row += (report.ok && rec.ok) ? '1' : '0';
    row += ',';
    row += detail::fmt17(ms);
    row += '\n';
    return row;
}

} // namespace

const char* sweep_csv_header() {
    return "model,dist,n,eps,trial,norm_before,norm_after,C_emp,mask_rows,"
           "mask_cols,ok,ms\n";
}

SweepSpec parse_sweep_spec(const std::string& text) {
    SweepSpec spec;
    bool saw_models = false, saw_dists = false, saw_sizes = false,
         saw_eps = false;

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = 0;
        while (start < line.size() &&
               (line[start] == ' ' || line[start] == '\t'))
            ++start;
        line.erase(0, start);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("sweep spec line " + std::to_string(lineno) +
                                 " is not key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        if (key == "models") {
            for (const std::string& m : split_list(value))
                spec.models.push_back(parse_model(m));
            saw_models = true;
        } else if (key == "dists") {
            for (const std::string& d : split_list(value))
                spec.distributions.push_back(parse_sampler(d));
            saw_dists = true;
        } else if (key == "sizes") {
            for (const std::string& s : split_list(value)) {
                char* end = nullptr;
                const long long n = std::strtoll(s.c_str(), &end, 10);
                if (end == s.c_str() || *end != '\0' || n < 2)
                    throw ParameterError("bad size '" + s + "'");
                spec.sizes.push_back(static_cast<index_t>(n));
            }
            saw_sizes = true;
        } else if (key == "eps") {
            for (const std::string& e : split_list(value)) {
                char* end = nullptr;
                const double x = std::strtod(e.c_str(), &end);
                if (end == e.c_str() || *end != '\0')
                    throw ParameterError("bad eps '" + e + "'");
                spec.epsilons.push_back(x);
            }
            saw_eps = true;
        } else if (key == "trials") {
            char* end = nullptr;
            const long t = std::strtol(value.c_str(), &end, 10);
            if (end == value.c_str() || *end != '\0' || t < 1)
                throw ParameterError("trials must be a positive integer");
            spec.trials = static_cast<int>(t);
        } else if (key == "seed") {
            char* end = nullptr;
            const unsigned long long s = std::strtoull(value.c_str(), &end, 10);
            if (end == value.c_str() || *end != '\0')
                throw ParameterError("bad seed '" + value + "'");
            spec.base_seed = s;
        } else if (key == "timing") {
            if (value != "0" && value != "1")
                throw ParameterError("timing must be 0 or 1");
            spec.include_timing = value == "1";
        } else if (key == "output") {
            spec.output = value;
        } else {
            throw ParameterError("unknown sweep key '" + key + "'");
        }
    }

    if (!saw_models || !saw_dists || !saw_sizes || !saw_eps)
        throw ParameterError("sweep spec needs models, dists, sizes, and eps");
    return spec;
}

std::string run_sweep(const SweepSpec& spec) {
    return run_sweep(spec, RegConfig{});
}

std::string run_sweep(const SweepSpec& spec, const RegConfig& base_cfg) {
    if (spec.models.empty() || spec.distributions.empty() ||
        spec.sizes.empty() || spec.epsilons.empty())
        throw ParameterError("sweep spec has an empty axis");
    if (spec.trials < 1) throw ParameterError("sweep needs trials >= 1");

    std::vector<Cell> cells;
    for (Model model : spec.models)
        for (const SamplerSpec& dist : spec.distributions)
            for (index_t n : spec.sizes)
                for (double eps : spec.epsilons)
                    cells.push_back(Cell{model, &dist, n, eps});

    const std::size_t total = cells.size() * static_cast<std::size_t>(spec.trials);
    std::vector<std::string> rows(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            const Cell& cell = cells[k / spec.trials];
            const int trial = static_cast<int>(k % spec.trials);
            try {
                rows[k] = run_trial(cell, trial, spec.base_seed + k, base_cfg,
                                    spec.include_timing);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(total);
                return;
            }
        }
    };

    const int workers =
        static_cast<int>(std::min<std::size_t>(thread_cap(), total));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::string csv = sweep_csv_header();
    for (const std::string& row : rows) csv += row;
    return csv;
}

} // namespace normreg
