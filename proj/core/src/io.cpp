#include "normreg/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "normreg/errors.hpp"
#include "normreg/sampling.hpp"
#include "textfmt.hpp"

namespace normreg {

using detail::fmt17;

namespace {

constexpr index_t kCsvCap = 200;

void put_le(std::string& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int k = 0; k < 8; ++k)
        out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

double get_le(const char* p) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k]))
                << (8 * k);
    double x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
}

index_t parse_index(const std::string& text, const char* what) {
    const char* s = text.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0' || v < 0)
        throw IoError(std::string("bad ") + what + " '" + text + "'");
    return static_cast<index_t>(v);
}

double parse_double_strict(const char* s, const char** rest, const char* what) {
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s)
        throw IoError(std::string("expected a number for ") + what);
    *rest = end;
    return x;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

const char* stage_kind_name(Stage stage) {
    switch (stage) {
    case Stage::L:
        return "large";
    case Stage::M1:
        return "degree";
    case Stage::M2:
        return "pairs";
    case Stage::SCols:
        return "small-cols";
    case Stage::SRows:
        return "small-rows";
    }
    return "?";
}

void append_index_list(std::string& out, const char* label,
                       const IndexSet& set) {
    out += label;
    out += ':';
    for (index_t i : set.indices()) {
        out += ' ';
        out += std::to_string(i);
    }
    out += '\n';
}

std::vector<index_t> parse_index_list(const std::string& line,
                                      const char* label) {
    const std::string prefix = std::string(label) + ":";
    if (line.compare(0, prefix.size(), prefix) != 0)
        throw IoError(std::string("mask line must start with '") + prefix + "'");
    std::vector<index_t> out;
    std::istringstream rest(line.substr(prefix.size()));
    std::string token;
    while (rest >> token) out.push_back(parse_index(token, "mask index"));
    return out;
}

} // namespace

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return std::move(buf).str();
}

void spit_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failure on '" + path + "'");
}

void write_mxf(const std::string& path, const DenseMatrix& a) {
    std::string out = "MXF1\n";
    out += "rows=" + std::to_string(a.rows()) + " cols=" +
           std::to_string(a.cols()) + " dtype=f64le layout=row-major\n";
    out.reserve(out.size() + a.entries().size() * 8);
    for (double x : a.entries()) put_le(out, x);
    spit_file(path, out);
}

DenseMatrix read_mxf(const std::string& path) {
    const std::string data = slurp_file(path);

    const std::size_t magic_end = data.find('\n');
    if (magic_end == std::string::npos || data.substr(0, magic_end) != "MXF1")
        throw IoError("'" + path + "' is not an MXF file");
    const std::size_t header_end = data.find('\n', magic_end + 1);
    if (header_end == std::string::npos)
        throw IoError("'" + path + "': missing MXF header");

    index_t rows = -1, cols = -1;
    bool dtype_ok = false, layout_ok = false;
    std::istringstream header(
        data.substr(magic_end + 1, header_end - magic_end - 1));
    std::string token;
    while (header >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw IoError("'" + path + "': malformed header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "rows") rows = parse_index(value, "rows");
        else if (key == "cols") cols = parse_index(value, "cols");
        else if (key == "dtype") dtype_ok = (value == "f64le");
        else if (key == "layout") layout_ok = (value == "row-major");
        // Unknown keys pass through for forward compatibility.
    }
    if (rows < 0 || cols < 0)
        throw IoError("'" + path + "': header must give rows and cols");
    if (!dtype_ok) throw IoError("'" + path + "': unsupported dtype");
    if (!layout_ok) throw IoError("'" + path + "': unsupported layout");

    const std::size_t offset = header_end + 1;
    const std::uint64_t count =
        static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    if (cols != 0 && count / static_cast<std::uint64_t>(cols) !=
                         static_cast<std::uint64_t>(rows))
        throw IoError("'" + path + "': shape overflows");
    if (data.size() - offset != count * 8)
        throw IoError("'" + path + "': payload size does not match header");

    std::vector<double> entries(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        entries[k] = get_le(data.data() + offset + k * 8);
        if (!std::isfinite(entries[k]))
            throw IoError("'" + path + "': non-finite entry");
    }
    return DenseMatrix(rows, cols, std::move(entries));
}

void write_csv(const std::string& path, const DenseMatrix& a) {
    if (a.rows() > kCsvCap || a.cols() > kCsvCap)
        throw CapacityError("csv matrices are capped at 200 x 200");
    std::string out;
    for (index_t i = 0; i < a.rows(); ++i) {
        for (index_t j = 0; j < a.cols(); ++j) {
            if (j > 0) out += ',';
            out += fmt17(a(i, j));
        }
        out += '\n';
    }
    spit_file(path, out);
}

DenseMatrix read_csv(const std::string& path) {
    const std::vector<std::string> lines = split_lines(slurp_file(path));
    const index_t rows = static_cast<index_t>(lines.size());
    if (rows == 0) return DenseMatrix();
    if (rows > kCsvCap)
        throw CapacityError("csv matrices are capped at 200 x 200");

    std::vector<double> entries;
    index_t cols = -1;
    for (const std::string& line : lines) {
        index_t line_cols = 0;
        const char* p = line.c_str();
        while (true) {
            const double x = parse_double_strict(p, &p, "csv entry");
            if (!std::isfinite(x))
                throw IoError("'" + path + "': non-finite entry");
            entries.push_back(x);
            ++line_cols;
            while (*p == ' ') ++p;
            if (*p == '\0') break;
            if (*p != ',')
                throw IoError("'" + path + "': expected ',' in csv row");
            ++p;
        }
        if (cols < 0) {
            cols = line_cols;
            if (cols > kCsvCap)
                throw CapacityError("csv matrices are capped at 200 x 200");
        } else if (line_cols != cols) {
            throw IoError("'" + path + "': ragged csv rows");
        }
    }
    return DenseMatrix(rows, cols, std::move(entries));
}

void save_matrix(const std::string& path, const DenseMatrix& a) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        write_csv(path, a);
    else
        write_mxf(path, a);
}

DenseMatrix load_matrix(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return read_csv(path);
    return read_mxf(path);
}

std::string format_mask(const SubmatrixMask& mask) {
    std::string out;
    out += "rows_n=" + std::to_string(mask.rows.bound()) + '\n';
    out += "cols_n=" + std::to_string(mask.cols.bound()) + '\n';
    append_index_list(out, "rows", mask.rows);
    append_index_list(out, "cols", mask.cols);
    return out;
}

SubmatrixMask parse_mask(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    if (lines.size() != 4)
        throw IoError("mask document must have exactly four lines");
    if (lines[0].compare(0, 7, "rows_n=") != 0 ||
        lines[1].compare(0, 7, "cols_n=") != 0)
        throw IoError("mask document must start with rows_n= and cols_n=");
    const index_t rows_n = parse_index(lines[0].substr(7), "rows_n");
    const index_t cols_n = parse_index(lines[1].substr(7), "cols_n");
    try {
        return SubmatrixMask{
            IndexSet::of(parse_index_list(lines[2], "rows"), rows_n),
            IndexSet::of(parse_index_list(lines[3], "cols"), cols_n)};
    } catch (const DimensionError& e) {
        throw IoError(std::string("bad mask document: ") + e.what());
    }
}

void write_mask(const std::string& path, const SubmatrixMask& mask) {
    spit_file(path, format_mask(mask));
}

SubmatrixMask read_mask(const std::string& path) {
    return parse_mask(slurp_file(path));
}

std::string format_report(const RegularizationReport& report,
                          bool include_timing) {
    std::string out;
    out += std::string("model=") + model_name(report.model) + '\n';
    out += std::string("ok=") + (report.ok ? "1" : "0") + '\n';
    out += "norm_before=" + fmt17(report.norm_before) + '\n';
    out += "norm_after=" + fmt17(report.norm_after) + '\n';
    out += "norm_2inf_small_after=" + fmt17(report.norm_2inf_small_after) + '\n';
    out += "empirical_constant=" + fmt17(report.empirical_constant) + '\n';
    out += "mu_star=" + fmt17(report.mu_star) + '\n';
    out += "mask_rows=" + std::to_string(report.final_mask.rows.size()) + '\n';
    out += "mask_cols=" + std::to_string(report.final_mask.cols.size()) + '\n';
    out += "stages=" + std::to_string(report.stage_masks.size()) + '\n';
    for (std::size_t t = 0; t < report.stage_masks.size(); ++t) {
        const StageMask& sm = report.stage_masks[t];
        const std::string head = "stage." + std::to_string(t) + '.';
        out += head + "kind=" + stage_kind_name(sm.stage) + '\n';
        out += head + "ok=" + (sm.ok ? "1" : "0") + '\n';
        out += head + "count=" + std::to_string(sm.count) + '\n';
        out += head + "budget=" + fmt17(sm.budget) + '\n';
        out += head + "rows=" + std::to_string(sm.mask.rows.size()) + '\n';
        out += head + "cols=" + std::to_string(sm.mask.cols.size()) + '\n';
    }
    if (include_timing)
        for (const auto& [name, ms] : report.timings_ms)
            out += "timing." + name + "=" + fmt17(ms) + '\n';
    return out;
}

void write_report(const std::string& path, const RegularizationReport& report,
                  bool include_timing) {
    spit_file(path, format_report(report, include_timing));
}

std::string format_verification(const VerificationRecord& record) {
    std::string out;
    out += "norm_before=" + fmt17(record.norm_before) + '\n';
    out += "norm_after=" + fmt17(record.norm_after) + '\n';
    out += "mask_rows=" + std::to_string(record.mask_rows) + '\n';
    out += "mask_cols=" + std::to_string(record.mask_cols) + '\n';
    out += "budget=" + fmt17(record.budget) + '\n';
    out += std::string("budget_ok=") + (record.budget_ok ? "1" : "0") + '\n';
    out += std::string("monotone_ok=") + (record.monotone_ok ? "1" : "0") + '\n';
    out += std::string("combination_ok=") +
           (record.combination_ok ? "1" : "0") + '\n';
    out += std::string("ok=") + (record.ok ? "1" : "0") + '\n';
    return out;
}

} // namespace normreg
