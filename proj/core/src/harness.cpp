#include "kernelcur/harness.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "kernelcur/metrics.hpp"

namespace kernelcur::harness {

BatchAborted::BatchAborted(const std::string& reason,
                           std::vector<std::optional<EvalResult>> completed)
    : Error("batch aborted: " + reason), completed_(std::move(completed)) {}

std::size_t BatchAborted::n_completed() const noexcept {
    std::size_t n = 0;
    for (const auto& r : completed_) n += r.has_value();
    return n;
}

namespace {

bool usable_time(const std::optional<double>& t) {
    return t && std::isfinite(*t) && *t > 0.0;
}

void append_note(std::string& diagnostics, const std::string& note) {
    if (!diagnostics.empty()) diagnostics += "; ";
    diagnostics += note;
}

}  // namespace

EvalResult derive_eval(const RecordKey& key, const RunnerResponse& response,
                       const std::string& config_hash, bool* clamped) {
    EvalResult e;
    e.task_id = key.task_id;
    e.gen_index = key.gen_index;
    e.status = response.status;
    e.diagnostics = response.diagnostics;
    e.config_hash = config_hash;
    bool fixed = false;

    if (e.status == Status::correct) {
        if (usable_time(response.t_ref_ms) && usable_time(response.t_kernel_ms)) {
            e.t_ref_ms = response.t_ref_ms;
            e.t_kernel_ms = response.t_kernel_ms;
            e.speedup = metrics::speedup(*e.t_ref_ms, *e.t_kernel_ms, true);
        } else {
            e.status = Status::runtime_error;
            append_note(e.diagnostics,
                        "harness: correct verdict without positive timings; reported as runtime_error");
            fixed = true;
        }
    } else if (response.t_ref_ms || response.t_kernel_ms) {
        append_note(e.diagnostics, "harness: timings dropped for non-correct verdict");
        fixed = true;
    }
    if (clamped) *clamped = fixed;
    return e;
}

EvaluateOutput evaluate(const std::vector<GenerationRecord>& records, Runner& runner,
                        const RunConfig& cfg, const EvaluateOptions& options) {
    cfg.validate();
    const std::string config_hash = cfg.hash();
    const std::size_t n = records.size();

    EvaluateOutput out;
    out.stats.n_records = n;
    std::vector<std::optional<RunnerResponse>> responses(n);
    std::vector<std::string> cache_keys(n);
    std::vector<bool> from_cache(n, false);
    std::vector<std::size_t> pending;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[i];
        if (r.task_source.empty() || r.kernel_source.empty()) {
            RunnerResponse empty;
            empty.id = protocol::request_id(r.key());
            empty.status = Status::compile_error;
            empty.diagnostics = r.kernel_source.empty() ? "harness: empty kernel_source"
                                                        : "harness: empty task_source";
            empty.synthetic = true;
            responses[i] = std::move(empty);
            continue;
        }
        if (options.cache) {
            cache_keys[i] = ResultCache::key_for(r.task_source, r.kernel_source, config_hash);
            if (auto hit = options.cache->lookup(cache_keys[i])) {
                hit->id = protocol::request_id(r.key());
                responses[i] = std::move(*hit);
                from_cache[i] = true;
                ++out.stats.cache_hits;
                continue;
            }
        }
        pending.push_back(i);
    }

    const std::size_t lanes = std::max<std::size_t>(1, std::min(options.workers, pending.size()));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex abort_mutex;
    std::string abort_reason;

    auto work = [&](std::size_t lane) {
        while (!abort.load()) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= pending.size()) return;
            const std::size_t i = pending[slot];
            const auto& r = records[i];
            RunnerRequest request{protocol::request_id(r.key()), r.key(), r.task_source,
                                  r.kernel_source, cfg};
            try {
                RunnerResponse response = runner.evaluate(lane, request);
                if (response.id != request.id) {
                    throw ProtocolError("response id \"" + response.id + "\" does not match \"" +
                                        request.id + "\"");
                }
                responses[i] = std::move(response);
            } catch (const std::exception& e) {
                std::lock_guard lock(abort_mutex);
                if (!abort.exchange(true)) abort_reason = e.what();
                return;
            }
        }
    };

    if (!pending.empty()) {
        try {
            runner.open(lanes);
        } catch (const std::exception& e) {
            std::vector<std::optional<EvalResult>> done(n);
            throw BatchAborted(e.what(), std::move(done));
        }
        if (lanes == 1) {
            work(0);
        } else {
            std::vector<std::jthread> threads;
            threads.reserve(lanes);
            for (std::size_t lane = 0; lane < lanes; ++lane) threads.emplace_back(work, lane);
        }
        for (std::size_t i : pending) out.stats.runner_calls += responses[i].has_value();
    }

    // Single collector: derive, cache, and assemble in input order.
    std::vector<std::optional<EvalResult>> done(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!responses[i]) continue;
        bool clamped = false;
        done[i] = derive_eval(records[i].key(), *responses[i], config_hash, &clamped);
        if (clamped) ++out.stats.inconsistent;
        if (options.cache && !from_cache[i] && !cache_keys[i].empty()) {
            options.cache->store(cache_keys[i], *responses[i]);
        }
    }

    if (abort.load()) throw BatchAborted(abort_reason, std::move(done));

    out.results.reserve(n);
    for (auto& r : done) out.results.push_back(std::move(*r));
    return out;
}

}  // namespace kernelcur::harness
