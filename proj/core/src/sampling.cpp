#include "normreg/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <sstream>

#include "normreg/errors.hpp"
#include "rng.hpp"
#include "textfmt.hpp"

namespace normreg {

namespace {

void check_law(const SamplerSpec& spec, double n_for_scale) {
    switch (spec.kind) {
    case Law::gaussian:
    case Law::rademacher:
        return;
    case Law::three_point:
        if (!(spec.eps_prime > 0.0) || !std::isfinite(spec.eps_prime))
            throw ParameterError("three_point needs eps' > 0");
        if (!(n_for_scale > 2.0 * spec.eps_prime))
            throw ParameterError("three_point needs n > 2 eps'");
        return;
    case Law::pareto_sym:
        if (!(spec.alpha > 2.0) || !std::isfinite(spec.alpha))
            throw ParameterError("pareto_sym needs alpha > 2");
        return;
    case Law::table: {
        if (spec.table.empty())
            throw ParameterError("table law needs at least one atom");
        double total = 0.0;
        for (const auto& [value, prob] : spec.table) {
            if (!std::isfinite(value))
                throw ParameterError("table value must be finite");
            if (!(prob >= 0.0) || !std::isfinite(prob))
                throw ParameterError("table probability must be >= 0");
            total += prob;
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw ParameterError("table probabilities must sum to 1");
        return;
    }
    }
    throw ParameterError("unknown law");
}

double law_draw(const SamplerSpec& spec, double n_for_scale, std::uint64_t key) {
    using detail::draw_bits;
    switch (spec.kind) {
    case Law::gaussian: {
        const double u1 = detail::unit_closed(draw_bits(key, 0));
        const double u2 = detail::unit_open(draw_bits(key, 1));
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }
    case Law::rademacher:
        return detail::unit_open(draw_bits(key, 0)) < 0.5 ? -1.0 : 1.0;
    case Law::three_point: {
        // 0 with probability 1 - 2p, +/- sqrt(n / (2 eps')) with p = eps'/n
        // each. Unit variance: 2p * n/(2 eps') = 1.
        const double p = spec.eps_prime / n_for_scale;
        const double u = detail::unit_open(draw_bits(key, 0));
        if (u >= 2.0 * p) return 0.0;
        const double v = std::sqrt(n_for_scale / (2.0 * spec.eps_prime));
        return u < p ? v : -v;
    }
    case Law::pareto_sym: {
        // Pareto(alpha, 1) magnitude standardized to mean 0 variance 1,
        // then given a random sign. Fourth moment is infinite for
        // alpha <= 4, which is the regime of interest.
        const double a = spec.alpha;
        const double sign =
            detail::unit_open(draw_bits(key, 0)) < 0.5 ? -1.0 : 1.0;
        const double u = detail::unit_open(draw_bits(key, 1));
        const double p = std::pow(1.0 - u, -1.0 / a);
        const double mean = a / (a - 1.0);
        const double var = a / (a - 2.0) - mean * mean;
        return sign * (p - mean) / std::sqrt(var);
    }
    case Law::table: {
        const double u = detail::unit_open(draw_bits(key, 0));
        double acc = 0.0;
        for (const auto& [value, prob] : spec.table) {
            acc += prob;
            if (u < acc) return value;
        }
        return spec.table.back().first;
    }
    }
    return 0.0;
}

double parse_number(const std::string& text, const char* what) {
    const char* s = text.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ParameterError(std::string("expected a number for ") + what +
                             ", got '" + text + "'");
    return x;
}

} // namespace

double sample_entry(const SamplerSpec& spec, index_t n, index_t i, index_t j) {
    check_law(spec, static_cast<double>(n));
    return law_draw(spec, static_cast<double>(n),
                    detail::entry_key(spec.seed, i, j));
}

DenseMatrix sample_matrix(const SamplerSpec& spec, index_t n, Model model) {
    if (n < 2) throw DimensionError("sample_matrix needs n >= 2");
    const double nd = static_cast<double>(n);
    check_law(spec, nd);

    DenseMatrix a(n, n);
    switch (model) {
    case Model::iid:
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j)
                a(i, j) = law_draw(spec, nd, detail::entry_key(spec.seed, i, j));
        break;
    case Model::upper:
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i + 1; j < n; ++j)
                a(i, j) = law_draw(spec, nd, detail::entry_key(spec.seed, i, j));
        break;
    case Model::symmetric:
        // Mirror of the strict upper draw; the diagonal stays zero so the
        // matrix is exactly symmetric with one draw per unordered pair.
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i + 1; j < n; ++j) {
                const double x =
                    law_draw(spec, nd, detail::entry_key(spec.seed, i, j));
                a(i, j) = x;
                a(j, i) = x;
            }
        break;
    }
    return a;
}

MomentEstimate sample_moments(const SamplerSpec& spec, index_t n,
                              std::int64_t count) {
    if (count <= 0) throw ParameterError("sample_moments needs count > 0");
    const double nd = static_cast<double>(n);
    check_law(spec, nd);

    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = 0; t < count; ++t) {
        const double x = law_draw(
            spec, nd, detail::entry_key(spec.seed, static_cast<index_t>(t), 0));
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / static_cast<double>(count);
    return MomentEstimate{mean, sumsq / static_cast<double>(count) - mean * mean};
}

SamplerSpec parse_sampler(const std::string& text) {
    SamplerSpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest =
        colon == std::string::npos ? std::string() : text.substr(colon + 1);

    if (head == "gaussian") {
        spec.kind = Law::gaussian;
    } else if (head == "rademacher") {
        spec.kind = Law::rademacher;
    } else if (head == "three_point") {
        spec.kind = Law::three_point;
        if (!rest.empty()) spec.eps_prime = parse_number(rest, "eps'");
    } else if (head == "pareto_sym") {
        spec.kind = Law::pareto_sym;
        if (!rest.empty()) spec.alpha = parse_number(rest, "alpha");
    } else if (head == "table") {
        spec.kind = Law::table;
        std::stringstream atoms(rest);
        std::string atom;
        while (std::getline(atoms, atom, ';')) {
            const auto split = atom.rfind(':');
            if (split == std::string::npos)
                throw ParameterError("table atom must be value:probability");
            spec.table.emplace_back(
                parse_number(atom.substr(0, split), "table value"),
                parse_number(atom.substr(split + 1), "table probability"));
        }
        if (spec.table.empty())
            throw ParameterError("table law needs at least one atom");
    } else {
        throw ParameterError("unknown law '" + head + "'");
    }

    if (spec.kind == Law::three_point) {
        if (!(spec.eps_prime > 0.0) || !std::isfinite(spec.eps_prime))
            throw ParameterError("three_point needs eps' > 0");
    } else {
        check_law(spec, 4.0);
    }
    return spec;
}

std::string sampler_name(const SamplerSpec& spec) {
    switch (spec.kind) {
    case Law::gaussian:
        return "gaussian";
    case Law::rademacher:
        return "rademacher";
    case Law::three_point:
        return "three_point:" + detail::fmt_short(spec.eps_prime);
    case Law::pareto_sym:
        return "pareto_sym:" + detail::fmt_short(spec.alpha);
    case Law::table: {
        std::string out = "table:";
        for (std::size_t k = 0; k < spec.table.size(); ++k) {
            if (k > 0) out += ';';
            out += detail::fmt_short(spec.table[k].first);
            out += ':';
            out += detail::fmt_short(spec.table[k].second);
        }
        return out;
    }
    }
    return "?";
}

const char* model_name(Model model) {
    switch (model) {
    case Model::upper:
        return "upper";
    case Model::iid:
        return "iid";
    case Model::symmetric:
        return "symmetric";
    }
    return "?";
}

Model parse_model(const std::string& text) {
    if (text == "upper") return Model::upper;
    if (text == "iid") return Model::iid;
    if (text == "symmetric") return Model::symmetric;
    throw ParameterError("unknown model '" + text + "'");
}

} // namespace normreg
