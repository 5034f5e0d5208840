#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcur/jsonl.hpp"
#include "kernelcur/records.hpp"

namespace kernelcur::curation {

// Which selection rule admitted a sample into the curated set.
//   A: the shortest-reasoning generation of a task is also its fastest
//   B: any correct generation above the speedup threshold
//   C: best correct generation of a single-operator task, for balance
enum class Part { A_short_and_fast, B_high_speedup, C_single_op_balance };

enum class Policy { concur, random, max_len, min_len, speedup_first };

std::string_view to_string(Part part);
std::string_view to_string(Policy policy);
std::optional<Part> parse_part(std::string_view text);
std::optional<Policy> parse_policy(std::string_view text);

struct CuratedSample {
    std::string task_id;
    std::int64_t gen_index = 0;
    // Unset for the ablation policies, which have no three-part structure.
    std::optional<Part> part;
    Policy policy = Policy::concur;
    double speedup = 0.0;
    std::int64_t reasoning_tokens = 0;

    RecordKey key() const { return {task_id, gen_index}; }
    bool operator==(const CuratedSample&) const = default;
};

inline constexpr double kDefaultSpeedupThreshold = 5.0;
inline constexpr std::int64_t kDefaultTargetSize = 4892;

struct CurationConfig {
    double speedup_threshold = kDefaultSpeedupThreshold;
    std::int64_t single_op_target = 0;  // 0 takes every eligible task
    Policy policy = Policy::concur;
    std::uint64_t seed = 0;
    std::int64_t target_size = kDefaultTargetSize;
    // Classify untagged tasks with the operator-count heuristic before part C.
    bool single_op_heuristic = false;

    void validate() const;
};

struct PartTallies {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;

    bool operator==(const PartTallies&) const = default;
};

struct PartCResult {
    std::vector<CuratedSample> samples;
    std::int64_t n_unknown_skipped = 0;
};

struct CurationResult {
    std::vector<CuratedSample> samples;  // sorted by (part, task_id, gen_index)
    PartTallies tallies;
    std::int64_t n_unknown_skipped = 0;
    std::int64_t n_tasks_eligible = 0;
    std::vector<std::string> warnings;
};

std::optional<CuratedSample> select_part_a(const TaskGroup& group);

std::vector<CuratedSample> select_part_b(const std::vector<TaskGroup>& groups, double threshold,
                                         const std::set<RecordKey>& already = {});

PartCResult select_part_c(const std::vector<TaskGroup>& groups, const std::set<RecordKey>& already,
                          std::int64_t target);

CurationResult curate(const std::vector<TaskGroup>& groups, const CurationConfig& cfg);

// Counts distinct framework operator calls in a reference program and tags it
// single_op when exactly one appears. A rough stand-in for a real classifier.
TaskType classify_task_type_heuristic(std::string_view task_source);

// Header line followed by one line per sample.
std::string format_curated(const CurationResult& result, const CurationConfig& cfg);
void write_curated(const std::filesystem::path& path, const CurationResult& result,
                   const CurationConfig& cfg);

struct CuratedFile {
    Json header;
    std::vector<CuratedSample> samples;
};

CuratedFile read_curated(const std::filesystem::path& path);

}  // namespace kernelcur::curation
