#pragma once

// Synthetic generations and evaluations for tests and benchmarks.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kernelcur/records.hpp"

namespace testing_support {

struct CorpusSpec {
    int n_tasks = 200;
    int gens_per_task = 5;
    double p_correct = 0.45;
    std::uint64_t seed = 1;
    // Draw lengths from a small set so ties are common.
    bool coarse_lengths = false;
};

inline std::string task_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "task_%05d", i);
    return buf;
}

inline kernelcur::TaskGroupItem make_item(const std::string& task, std::int64_t gen,
                                          kernelcur::TaskType type, std::int64_t tokens,
                                          bool correct, double speedup) {
    kernelcur::TaskGroupItem item;
    item.record.task_id = task;
    item.record.gen_index = gen;
    item.record.task_type = type;
    item.record.reasoning_tokens = tokens;
    item.record.task_source = "ref " + task;
    item.record.kernel_source = "kernel " + task + " " + std::to_string(gen);
    item.record.reasoning_trace = "trace " + task + " " + std::to_string(gen);
    item.eval.task_id = task;
    item.eval.gen_index = gen;
    item.eval.status = correct ? kernelcur::Status::correct : kernelcur::Status::incorrect;
    item.eval.speedup = correct ? speedup : 0.0;
    if (correct) {
        item.eval.t_kernel_ms = 1.0;
        item.eval.t_ref_ms = speedup;
    }
    return item;
}

inline std::vector<kernelcur::TaskGroup> make_groups(const CorpusSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<kernelcur::TaskGroup> groups;
    for (int t = 0; t < spec.n_tasks; ++t) {
        kernelcur::TaskGroup g;
        g.task_id = task_name(t);
        const double u = unit(rng);
        g.task_type = u < 0.45   ? kernelcur::TaskType::single_op
                      : u < 0.9 ? kernelcur::TaskType::multi_op
                                : kernelcur::TaskType::unknown;
        for (int k = 0; k < spec.gens_per_task; ++k) {
            const bool correct = unit(rng) < spec.p_correct;
            // log-uniform over [0.1, 20]; coarse mode snaps to a few values
            double s = std::exp(std::log(0.1) + unit(rng) * (std::log(20.0) - std::log(0.1)));
            std::int64_t len = 500 + static_cast<std::int64_t>(unit(rng) * 14000);
            if (spec.coarse_lengths) {
                len = 1000 * (1 + static_cast<std::int64_t>(unit(rng) * 4));
                s = 0.5 * (1 + static_cast<int>(unit(rng) * 16));
            }
            g.items.push_back(make_item(g.task_id, k, g.task_type, len, correct, s));
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

// Records with distinct kernel sources, suitable for the hashed runner.
inline std::vector<kernelcur::GenerationRecord> make_records(int n, std::uint64_t seed = 7,
                                                             int gens_per_task = 5) {
    std::mt19937_64 rng(seed);
    std::vector<kernelcur::GenerationRecord> out;
    for (int i = 0; i < n; ++i) {
        kernelcur::GenerationRecord r;
        r.task_id = task_name(i / gens_per_task);
        r.gen_index = i % gens_per_task;
        r.task_type = (i / gens_per_task) % 2 ? kernelcur::TaskType::multi_op
                                              : kernelcur::TaskType::single_op;
        r.task_source = "class Model: # " + r.task_id;
        r.kernel_source = "class ModelNew: # " + std::to_string(rng());
        r.reasoning_trace = "think " + std::to_string(i);
        r.reasoning_tokens = 100 + static_cast<std::int64_t>(rng() % 10000);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace testing_support
