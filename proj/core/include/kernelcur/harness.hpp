#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kernelcur/error.hpp"
#include "kernelcur/records.hpp"
#include "kernelcur/result_cache.hpp"
#include "kernelcur/run_config.hpp"
#include "kernelcur/runner.hpp"

namespace kernelcur::harness {

struct EvaluateOptions {
    std::size_t workers = 1;
    ResultCache* cache = nullptr;
};

struct EvaluateStats {
    std::size_t n_records = 0;
    std::size_t cache_hits = 0;
    std::size_t runner_calls = 0;
    std::size_t inconsistent = 0;  // runner verdicts the harness had to clamp
};

struct EvaluateOutput {
    std::vector<EvalResult> results;  // same order as the input records
    EvaluateStats stats;
};

// Raised when a runner breaks the protocol mid-batch. `completed` is indexed
// like the input; entries that finished before the abort are set.
class BatchAborted : public Error {
public:
    BatchAborted(const std::string& reason, std::vector<std::optional<EvalResult>> completed);

    const std::vector<std::optional<EvalResult>>& completed() const noexcept { return completed_; }
    std::size_t n_completed() const noexcept;

private:
    std::vector<std::optional<EvalResult>> completed_;
};

// Builds a consistent EvalResult from whatever the runner reported: speedup is
// derived from the timings, and a correct verdict without usable timings is
// downgraded to runtime_error with a note in diagnostics.
EvalResult derive_eval(const RecordKey& key, const RunnerResponse& response,
                       const std::string& config_hash, bool* clamped = nullptr);

EvaluateOutput evaluate(const std::vector<GenerationRecord>& records, Runner& runner,
                        const RunConfig& cfg, const EvaluateOptions& options = {});

}  // namespace kernelcur::harness
