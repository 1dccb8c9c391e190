#include <benchmark/benchmark.h>

#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"

using namespace kacm;

static void BM_density(benchmark::State& st) {
    const TransitionKernel kernels[] = {TransitionKernel::brownian(), TransitionKernel::brownian_drift(0.5),
                                        TransitionKernel::reflected_brownian(), TransitionKernel::killed_brownian(-1.0, 1.0)};
    const auto& k = kernels[st.range(0)];
    double y = -0.9;
    for (auto _ : st) {
        benchmark::DoNotOptimize(k.density(0.3, 0.1, y));
        y = y > 0.9 ? -0.9 : y + 1e-3;
    }
    st.SetLabel(k.name());
}
BENCHMARK(BM_density)->DenseRange(0, 3);

static void BM_killed_density_small_t(benchmark::State& st) {
    const auto k = TransitionKernel::killed_brownian(-1.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(k.density(1e-3, 0.99, 0.98));
}
BENCHMARK(BM_killed_density_small_t);

static void BM_potential_of_indicator(benchmark::State& st) {
    const auto b = TransitionKernel::brownian();
    const auto mu = RevuzMeasure::indicator(0.0, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(potential_of_measure(b, mu, 1.0, 0.3));
}
BENCHMARK(BM_potential_of_indicator);

static void BM_chapman_kolmogorov_lattice(benchmark::State& st) {
    const auto k = TransitionKernel::reflected_brownian();
    const auto grid = default_lattice(k, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(check_chapman_kolmogorov(k, 0.5, 0.5, grid));
}
BENCHMARK(BM_chapman_kolmogorov_lattice)->Unit(benchmark::kMillisecond);
