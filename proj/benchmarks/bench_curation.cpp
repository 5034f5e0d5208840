#include <benchmark/benchmark.h>

#include "kernelcur/curation.hpp"
#include "support/corpus.hpp"

namespace {

void BM_CurateConcur(benchmark::State& state) {
    const auto groups = testing_support::make_groups(
        {.n_tasks = static_cast<int>(state.range(0)), .gens_per_task = 5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernelcur::curation::curate(groups, {}).samples.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurateConcur)->Range(256, 1 << 15)->Unit(benchmark::kMillisecond);

void BM_CurateRandom(benchmark::State& state) {
    const auto groups = testing_support::make_groups(
        {.n_tasks = static_cast<int>(state.range(0)), .gens_per_task = 5});
    kernelcur::curation::CurationConfig cfg;
    cfg.policy = kernelcur::curation::Policy::random;
    cfg.target_size = state.range(0) / 4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernelcur::curation::curate(groups, cfg).samples.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurateRandom)->Range(256, 1 << 15)->Unit(benchmark::kMillisecond);

}  // namespace
