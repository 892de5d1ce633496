// Serial reference vs OpenMP for the two parallel kernels. On a one-core
// machine both arms run at the same speed; the numbers matter on wider hosts.

#include <benchmark/benchmark.h>

#include "opticon/oracle.hpp"
#include "opticon/zones.hpp"

namespace {

using namespace opticon;

void BM_GridKernelB(benchmark::State& st) {
    const auto p = EpidemicParams::reference();
    const GridOptions opt{static_cast<int>(st.range(0)), 9, st.range(1) != 0};
    for (auto _ : st) benchmark::DoNotOptimize(grid_viability_kernel(p, opt).count());
}
BENCHMARK(BM_GridKernelB)
    ->ArgNames({"res", "omp"})
    ->Args({128, 0})
    ->Args({128, 1})
    ->Args({256, 0})
    ->Args({256, 1})
    ->Unit(benchmark::kMillisecond);

void BM_Transcription(benchmark::State& st) {
    const auto p = EpidemicParams::reference();
    const TranscriptionProblem pb{static_cast<int>(st.range(0)), 500.0, SirState(0.7, 0.001), p, CostWeights{}};
    TranscriptionOptions opt;
    opt.parallel = st.range(1) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(solve_transcription(pb, 7, opt).cost);
}
BENCHMARK(BM_Transcription)
    ->ArgNames({"n", "omp"})
    ->Args({100, 0})
    ->Args({100, 1})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
