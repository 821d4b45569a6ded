#include <benchmark/benchmark.h>

#include <normreg/norms.hpp>
#include <normreg/sampling.hpp>

namespace {

using namespace normreg;

DenseMatrix gaussian(index_t n, std::uint64_t seed) {
    SamplerSpec spec;
    spec.seed = seed;
    return sample_matrix(spec, n, Model::iid);
}

void BM_op_norm_estimate(benchmark::State& state) {
    const index_t n = state.range(0);
    const DenseMatrix a = gaussian(n, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(op_norm_estimate(a, 1e-9, 10000));
    state.SetComplexityN(n);
}
BENCHMARK(BM_op_norm_estimate)->Arg(128)->Arg(512)->Arg(1024)->Complexity();

void BM_norm_2_to_inf(benchmark::State& state) {
    const index_t n = state.range(0);
    const DenseMatrix a = gaussian(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(norm_2_to_inf(a));
}
BENCHMARK(BM_norm_2_to_inf)->Arg(512)->Arg(2048);

void BM_schur_bound(benchmark::State& state) {
    const index_t n = state.range(0);
    const DenseMatrix a = gaussian(n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(schur_bound(a));
}
BENCHMARK(BM_schur_bound)->Arg(512)->Arg(2048);

} // namespace

BENCHMARK_MAIN();
