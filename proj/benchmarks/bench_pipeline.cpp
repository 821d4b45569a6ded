#include <benchmark/benchmark.h>

#include <normreg/buckets.hpp>
#include <normreg/pipeline.hpp>
#include <normreg/sampling.hpp>

namespace {

using namespace normreg;

DenseMatrix upper_gaussian(index_t n, std::uint64_t seed) {
    SamplerSpec spec;
    spec.seed = seed;
    return sample_matrix(spec, n, Model::upper);
}

void BM_decompose(benchmark::State& state) {
    const index_t n = state.range(0);
    const DenseMatrix t = upper_gaussian(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(decompose(t, 0.1));
}
BENCHMARK(BM_decompose)->Arg(512)->Arg(2048);

void BM_regularize_upper(benchmark::State& state) {
    const index_t n = state.range(0);
    const DenseMatrix t = upper_gaussian(n, 2);
    const RegConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(regularize_upper(t, cfg));
}
BENCHMARK(BM_regularize_upper)->Unit(benchmark::kMillisecond)->Arg(128)->Arg(256)->Arg(512);

void BM_regularize_symmetric(benchmark::State& state) {
    const index_t n = state.range(0);
    SamplerSpec spec;
    spec.seed = 3;
    const DenseMatrix a = sample_matrix(spec, n, Model::symmetric);
    const RegConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(regularize_symmetric(a, cfg));
}
BENCHMARK(BM_regularize_symmetric)->Unit(benchmark::kMillisecond)->Arg(128)->Arg(256);

} // namespace

BENCHMARK_MAIN();
