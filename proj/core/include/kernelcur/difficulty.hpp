#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcur/jsonl.hpp"
#include "kernelcur/records.hpp"

namespace kernelcur::difficulty {

enum class Tier { easy, medium, hard };

std::string_view to_string(Tier tier);

struct DifficultyConfig {
    double easy_max = 4000.0;
    double hard_min = 8500.0;
    std::int64_t min_generations = 10;

    void validate() const;
};

struct DifficultyLabel {
    std::string task_id;
    double task_arl = 0.0;
    Tier tier = Tier::medium;
    std::int64_t m_used = 0;
    // Fewer generations than cfg.min_generations; the ARL estimate is noisy.
    bool low_confidence = false;
};

// Mean reasoning length over every generation of the task, correct or not.
double task_arl(const TaskGroup& group);

// Easy strictly below easy_max, hard strictly above hard_min, medium otherwise
// (both band edges are medium).
Tier classify_arl(double arl, const DifficultyConfig& cfg);

std::vector<DifficultyLabel> classify(const std::vector<TaskGroup>& groups,
                                      const DifficultyConfig& cfg);

enum class TierAggregation {
    per_generation,  // every generation is one trial
    pass_at_k,       // a task passes if any of its first k generations does
};

struct TierReportOptions {
    TierAggregation aggregation = TierAggregation::per_generation;
    int k = 10;
    bool include_zeros = false;
};

struct TierStats {
    Tier tier = Tier::easy;
    std::int64_t n = 0;  // tasks in the tier
    std::optional<double> exec_rate;
    std::optional<double> geomean_speedup;
    std::int64_t n_zeros_excluded = 0;
};

// One row per tier in easy, medium, hard order. `groups` supplies the evals
// for every labeled task.
std::array<TierStats, 3> tier_report(const std::vector<DifficultyLabel>& labels,
                                     const std::vector<TaskGroup>& groups,
                                     const TierReportOptions& options = {});

// Summary line followed by one line per label.
std::string format_difficulty(const std::vector<DifficultyLabel>& labels,
                              const DifficultyConfig& cfg,
                              const std::optional<std::array<TierStats, 3>>& tiers,
                              const TierReportOptions& options);

}  // namespace kernelcur::difficulty
