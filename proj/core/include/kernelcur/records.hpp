#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcur/jsonl.hpp"

namespace kernelcur {

inline constexpr int kRecordFormatVersion = 1;

enum class TaskType { single_op, multi_op, unknown };

enum class Status { correct, incorrect, compile_error, runtime_error, timeout };

std::string_view to_string(TaskType type);
std::string_view to_string(Status status);
std::optional<TaskType> parse_task_type(std::string_view text);
std::optional<Status> parse_status(std::string_view text);

// Identity of one generation: the n-th candidate produced for a task.
struct RecordKey {
    std::string task_id;
    std::int64_t gen_index = 0;

    auto operator<=>(const RecordKey&) const = default;
    bool operator==(const RecordKey&) const = default;
};

std::string to_string(const RecordKey& key);

struct GenerationRecord {
    std::string task_id;
    std::int64_t gen_index = 0;
    std::string task_source;
    std::string kernel_source;
    std::string reasoning_trace;
    std::int64_t reasoning_tokens = 0;
    TaskType task_type = TaskType::unknown;
    // Set when reasoning_tokens came from the whitespace fallback rather than
    // the producer's tokenizer.
    bool tokens_approximate = false;
    // Fields this version does not know about, preserved for round-trip.
    Json extra = Json::object();

    RecordKey key() const { return {task_id, gen_index}; }
};

struct EvalResult {
    std::string task_id;
    std::int64_t gen_index = 0;
    Status status = Status::incorrect;
    std::optional<double> t_ref_ms;
    std::optional<double> t_kernel_ms;
    double speedup = 0.0;
    std::string diagnostics;
    std::string config_hash;
    Json extra = Json::object();

    RecordKey key() const { return {task_id, gen_index}; }
};

struct TaskGroupItem {
    GenerationRecord record;
    EvalResult eval;
};

// Every evaluated generation of one task, ordered by gen_index.
struct TaskGroup {
    std::string task_id;
    TaskType task_type = TaskType::unknown;
    std::vector<TaskGroupItem> items;
};

struct GroupingResult {
    std::vector<TaskGroup> groups;        // sorted by task_id
    std::vector<RecordKey> unevaluated;   // records with no matching eval
};

struct CountSummary {
    std::int64_t n_tasks = 0;
    std::int64_t n_generations = 0;
    std::int64_t n_correct = 0;
    std::int64_t n_tasks_with_correct = 0;

    bool operator==(const CountSummary&) const = default;
};

struct ReadOptions {
    // When reasoning_tokens is missing, count whitespace-separated words of
    // the trace instead of rejecting the line. Such records are flagged
    // approximate on output.
    bool approximate_tokens = false;
};

// Whitespace-split word count; a rough stand-in for a tokenizer.
std::int64_t approximate_token_count(std::string_view text);

GenerationRecord record_from_json(const Json& object, const ReadOptions& options = {});
OrderedJson record_to_json(const GenerationRecord& record);
EvalResult eval_from_json(const Json& object);
OrderedJson eval_to_json(const EvalResult& eval);

// Throws ValidationError when an EvalResult breaks the speedup/status invariants.
void validate_eval(const EvalResult& eval);

std::vector<GenerationRecord> read_records(const std::filesystem::path& path,
                                           const ReadOptions& options = {});
std::vector<EvalResult> read_evals(const std::filesystem::path& path);

std::string format_records(const std::vector<GenerationRecord>& records);
std::string format_evals(const std::vector<EvalResult>& evals);
void write_records(const std::filesystem::path& path, const std::vector<GenerationRecord>& records);
void write_evals(const std::filesystem::path& path, const std::vector<EvalResult>& evals);

GroupingResult group_by_task(const std::vector<GenerationRecord>& records,
                             const std::vector<EvalResult>& evals);

// Inverse of group_by_task over the evaluated subset, in group order.
std::vector<TaskGroupItem> flatten(const std::vector<TaskGroup>& groups);

CountSummary count_summary(const std::vector<TaskGroup>& groups);

}  // namespace kernelcur
