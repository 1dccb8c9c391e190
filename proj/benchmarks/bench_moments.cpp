#include <benchmark/benchmark.h>

#include "kacm/moments.hpp"

using namespace kacm;

static void BM_local_time_moment(benchmark::State& st) {
    const KacEngine e;
    const auto b = TransitionKernel::brownian();
    const auto d0 = RevuzMeasure::dirac(0.0);
    const int k = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(e.kth_moment(b, d0, k, 0.5, 1.0).value);
}
BENCHMARK(BM_local_time_moment)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_lebesgue_moment(benchmark::State& st) {
    const KacEngine e;
    const auto b = TransitionKernel::brownian();
    const auto leb = RevuzMeasure::lebesgue();
    const int k = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(e.kth_moment(b, leb, k, 0.0, 1.0).value);
}
BENCHMARK(BM_lebesgue_moment)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_mixed_permutation_sum(benchmark::State& st) {
    const KacEngine e;
    MomentRequest q;
    q.measures = {RevuzMeasure::dirac(0.0), RevuzMeasure::indicator(0.0, 1.0)};
    q.mode = OrderMode::PermutationSum;
    for (auto _ : st) benchmark::DoNotOptimize(e.permutation_sum_moment(q).value);
}
BENCHMARK(BM_mixed_permutation_sum)->Unit(benchmark::kMillisecond);

static void BM_killed_local_time(benchmark::State& st) {
    const KacEngine e;
    MomentRequest q;
    q.measures = {RevuzMeasure::dirac(0.0), RevuzMeasure::dirac(0.0)};
    for (auto _ : st) benchmark::DoNotOptimize(e.killed_variant(q, -1.0, 1.0).value);
}
BENCHMARK(BM_killed_local_time)->Unit(benchmark::kMillisecond);
