#include <benchmark/benchmark.h>

#include "kernelcur/harness.hpp"
#include "kernelcur/runner.hpp"
#include "support/corpus.hpp"

namespace {

void BM_EvaluateHashed(benchmark::State& state) {
    const auto records = testing_support::make_records(4096);
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto runner = kernelcur::mock_runner(kernelcur::MockMode::hashed);
        benchmark::DoNotOptimize(
            kernelcur::harness::evaluate(records, *runner, {}, {workers}).results.size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_EvaluateHashed)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
