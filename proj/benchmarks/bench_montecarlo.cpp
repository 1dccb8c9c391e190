#include <benchmark/benchmark.h>

#include <cstdint>

#include "kacm/montecarlo.hpp"
#include "kacm/philox.hpp"

using namespace kacm;

static void BM_philox_block(benchmark::State& st) {
    const Philox4x32 g(20240611);
    Philox4x32::Block c{0, 0, 0, 0};
    for (auto _ : st) {
        c = g(c);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_philox_block);

static void BM_normal_draw(benchmark::State& st) {
    const Philox4x32 g(1);
    NormalStream s(g, 0);
    for (auto _ : st) benchmark::DoNotOptimize(s.next());
}
BENCHMARK(BM_normal_draw);

// 1000 paths of 1000 steps; items are path steps
static void BM_local_time_paths(benchmark::State& st) {
    PathScheme s;
    s.dt = 1e-3;
    const auto method = static_cast<LocalTimeMethod>(st.range(0));
    const auto est = PcafEstimator::local_time(0.0, method, 0.05);
    McOptions o;
    o.n_paths = 1000;
    for (auto _ : st) benchmark::DoNotOptimize(estimate_moment(s, est, 0.0, 1.0, 1, o).mean);
    st.SetItemsProcessed(st.iterations() * 1000 * 1000);
    st.SetLabel(local_time_method_name(method));
}
BENCHMARK(BM_local_time_paths)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_killed_bridge_paths(benchmark::State& st) {
    PathScheme s;
    s.dt = 1e-3;
    s.kernel = TransitionKernel::killed_brownian(-1.0, 1.0);
    s.killing = KillDetection::BridgeCorrected;
    const auto est = PcafEstimator::local_time(0.0, LocalTimeMethod::Bridge);
    McOptions o;
    o.n_paths = 1000;
    for (auto _ : st) benchmark::DoNotOptimize(estimate_moment(s, est, 0.0, 1.0, 2, o).mean);
    st.SetItemsProcessed(st.iterations() * 1000 * 1000);
}
BENCHMARK(BM_killed_bridge_paths)->Unit(benchmark::kMillisecond);
