#include <random>

#include <benchmark/benchmark.h>

#include "kernelcur/analysis.hpp"
#include "kernelcur/metrics.hpp"

namespace {

std::vector<double> speedups(std::size_t n) {
    std::mt19937_64 rng(1);
    std::lognormal_distribution<double> dist(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = rng() % 3 ? dist(rng) : 0.0;
    return out;
}

void BM_FastP(benchmark::State& state) {
    const auto s = speedups(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernelcur::metrics::fast_p(s, 1.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FastP)->Range(1 << 10, 1 << 20);

void BM_Geomean(benchmark::State& state) {
    const auto s = speedups(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernelcur::metrics::geomean_speedup(s).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Geomean)->Range(1 << 10, 1 << 20);

void BM_Pearson(benchmark::State& state) {
    const auto x = speedups(static_cast<std::size_t>(state.range(0)));
    auto y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += static_cast<double>(i % 7);
    for (auto _ : state) benchmark::DoNotOptimize(kernelcur::analysis::pearson(x, y).p_value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pearson)->Range(1 << 10, 1 << 20);

}  // namespace
