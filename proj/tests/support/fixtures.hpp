#pragma once

#include <vector>

#include "kernelcur/records.hpp"
#include "support/corpus.hpp"

namespace testing_support {

// Five tasks built so the concur rules admit exactly two samples under A,
// one under B and one under C.
inline std::vector<kernelcur::TaskGroup> five_task_fixture() {
    using kernelcur::TaskType;
    struct Gen {
        std::int64_t tokens;
        bool correct;
        double speedup;
    };
    auto group = [](const std::string& id, TaskType type, std::vector<Gen> gens) {
        kernelcur::TaskGroup g;
        g.task_id = id;
        g.task_type = type;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            g.items.push_back(make_item(id, static_cast<std::int64_t>(i), type, gens[i].tokens,
                                        gens[i].correct, gens[i].speedup));
        }
        return g;
    };
    return {
        // shortest is fastest -> A
        group("t1", TaskType::multi_op, {{1000, true, 2.0}, {2000, true, 1.0}}),
        // shortest is fastest, other incorrect -> A
        group("t2", TaskType::multi_op, {{1500, true, 3.0}, {3000, false, 0.0}}),
        // shortest slower than a 6x sibling -> B
        group("t3", TaskType::multi_op, {{1000, true, 0.5}, {4000, true, 6.0}}),
        // shortest incorrect, single op -> C
        group("t4", TaskType::single_op, {{2000, true, 1.3}, {1000, false, 0.0}}),
        // nothing correct
        group("t5", TaskType::multi_op, {{1200, false, 0.0}, {900, false, 0.0}}),
    };
}

struct Split {
    std::vector<kernelcur::GenerationRecord> records;
    std::vector<kernelcur::EvalResult> evals;
};

inline Split split(const std::vector<kernelcur::TaskGroup>& groups) {
    Split s;
    for (const auto& g : groups) {
        for (const auto& item : g.items) {
            s.records.push_back(item.record);
            s.evals.push_back(item.eval);
        }
    }
    return s;
}

}  // namespace testing_support
