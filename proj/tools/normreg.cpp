// Command-line front end: generate random instances, regularize them,
// verify masks after the fact, and run experiment sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include <normreg/io.hpp>
#include <normreg/pipeline.hpp>
#include <normreg/sampling.hpp>
#include <normreg/sweep.hpp>

namespace {

using namespace normreg;

RegularizationReport run_model(const DenseMatrix& a, Model model,
                               const RegConfig& cfg) {
    switch (model) {
    case Model::upper:
        return regularize_upper(a, cfg);
    case Model::iid:
        return regularize_iid(a, cfg);
    case Model::symmetric:
        return regularize_symmetric(a, cfg);
    }
    throw ParameterError("unknown model");
}

int cmd_gen(const std::string& dist, index_t n, double eps, std::uint64_t seed,
            const std::string& model, const std::string& out) {
    SamplerSpec spec = parse_sampler(dist);
    if (spec.kind == Law::three_point && eps > 0.0) spec.eps_prime = eps;
    spec.seed = seed;
    save_matrix(out, sample_matrix(spec, n, parse_model(model)));
    return 0;
}

int cmd_reg(const std::string& in, double eps, const std::string& model,
            const std::string& report_path, const std::string& mask_path,
            bool timing) {
    RegConfig cfg;
    cfg.epsilon = eps;
    const DenseMatrix a = load_matrix(in);
    const RegularizationReport report = run_model(a, parse_model(model), cfg);
    if (report_path.empty())
        std::fputs(format_report(report, timing).c_str(), stdout);
    else
        write_report(report_path, report, timing);
    if (!mask_path.empty()) write_mask(mask_path, report.final_mask);
    return report.ok ? 0 : 2;
}

int cmd_verify(const std::string& in, const std::string& mask_path,
               double eps) {
    RegConfig cfg;
    cfg.epsilon = eps;
    const DenseMatrix a = load_matrix(in);
    const SubmatrixMask mask = read_mask(mask_path);
    const VerificationRecord rec = verify(a, mask, cfg);
    std::fputs(format_verification(rec).c_str(), stdout);
    return rec.ok ? 0 : 2;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_override) {
    SweepSpec spec = parse_sweep_spec(slurp_file(spec_path));
    if (!out_override.empty()) spec.output = out_override;
    const std::string csv = run_sweep(spec);
    if (spec.output.empty())
        std::fputs(csv.c_str(), stdout);
    else
        spit_file(spec.output, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic norm regularization toolkit"};
    app.require_subcommand(1);

    std::string dist = "gaussian", model = "iid", in, out, report_path,
                mask_path, spec_path;
    index_t n = 0;
    double eps = 0.0;
    std::uint64_t seed = 1;
    bool timing = false;

    CLI::App* gen = app.add_subcommand("gen", "Sample a random matrix");
    gen->add_option("--dist", dist,
                    "Law: gaussian, rademacher, three_point[:eps'], "
                    "pareto_sym[:alpha], table:v:p;v:p");
    gen->add_option("--n", n, "Matrix side length")->required();
    gen->add_option("--eps", eps, "Sparsity override for three_point");
    gen->add_option("--seed", seed, "Draw seed");
    gen->add_option("--model", model, "Fill pattern: upper, iid, symmetric");
    gen->add_option("-o,--out", out, "Output matrix (.csv is text, else MXF)")
        ->required();

    CLI::App* reg = app.add_subcommand("reg", "Regularize a matrix");
    reg->add_option("--eps", eps, "Zeroing budget epsilon")->required();
    reg->add_option("--model", model, "Input shape: upper, iid, symmetric");
    reg->add_option("-i,--in", in, "Input matrix")->required();
    reg->add_option("--report", report_path, "Report file (default: stdout)");
    reg->add_option("--mask", mask_path, "Mask output file");
    reg->add_flag("--timing", timing, "Include timing lines in the report");

    CLI::App* ver = app.add_subcommand("verify", "Check a mask against its input");
    ver->add_option("-i,--in", in, "Input matrix")->required();
    ver->add_option("--mask", mask_path, "Mask file")->required();
    ver->add_option("--eps", eps, "Budget epsilon the mask claims")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment grid");
    sweep->add_option("--spec", spec_path, "Sweep description file")->required();
    sweep->add_option("-o,--out", out, "CSV output (overrides spec's output=)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(dist, n, eps, seed, model, out);
        if (reg->parsed())
            return cmd_reg(in, eps, model, report_path, mask_path, timing);
        if (ver->parsed()) return cmd_verify(in, mask_path, eps);
        if (sweep->parsed()) return cmd_sweep(spec_path, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
