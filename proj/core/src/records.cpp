#include "kernelcur/records.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "kernelcur/error.hpp"

namespace kernelcur {

namespace {

constexpr std::string_view kRecordFields[] = {
    "version",       "task_id",       "gen_index",       "task_type",
    "reasoning_tokens", "reasoning_tokens_approximate", "task_source",
    "kernel_source", "reasoning_trace"};

constexpr std::string_view kEvalFields[] = {
    "version",   "task_id", "gen_index",   "status",     "t_ref_ms",
    "t_kernel_ms", "speedup", "diagnostics", "config_hash"};

template <std::size_t N>
Json collect_extra(const Json& object, const std::string_view (&known)[N]) {
    Json extra = Json::object();
    for (auto it = object.begin(); it != object.end(); ++it) {
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) {
            extra[it.key()] = it.value();
        }
    }
    return extra;
}

void check_version(const Json& object) {
    const std::int64_t version = field::integer(object, "version");
    if (version != kRecordFormatVersion) {
        throw Error("unsupported format version " + std::to_string(version));
    }
}

void append_extra(OrderedJson& out, const Json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        out[it.key()] = it.value();
    }
}

std::optional<double> optional_time(const Json& object, std::string_view key) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number()) {
        throw Error("field \"" + std::string(key) + "\" must be a number");
    }
    return it->get<double>();
}

}  // namespace

std::string_view to_string(TaskType type) {
    switch (type) {
        case TaskType::single_op: return "single_op";
        case TaskType::multi_op: return "multi_op";
        case TaskType::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(Status status) {
    switch (status) {
        case Status::correct: return "correct";
        case Status::incorrect: return "incorrect";
        case Status::compile_error: return "compile_error";
        case Status::runtime_error: return "runtime_error";
        case Status::timeout: return "timeout";
    }
    return "incorrect";
}

std::optional<TaskType> parse_task_type(std::string_view text) {
    for (TaskType t : {TaskType::single_op, TaskType::multi_op, TaskType::unknown}) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

std::optional<Status> parse_status(std::string_view text) {
    for (Status s : {Status::correct, Status::incorrect, Status::compile_error,
                     Status::runtime_error, Status::timeout}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::string to_string(const RecordKey& key) {
    return "(" + key.task_id + ", " + std::to_string(key.gen_index) + ")";
}

std::int64_t approximate_token_count(std::string_view text) {
    std::istringstream words{std::string(text)};
    std::int64_t n = 0;
    for (std::string w; words >> w;) ++n;
    return n;
}

GenerationRecord record_from_json(const Json& object, const ReadOptions& options) {
    check_version(object);
    GenerationRecord r;
    r.task_id = field::string(object, "task_id");
    if (r.task_id.empty()) throw Error("task_id must be non-empty");
    r.gen_index = field::integer(object, "gen_index");
    if (r.gen_index < 0) throw Error("gen_index must be >= 0");
    r.task_source = field::string(object, "task_source");
    r.kernel_source = field::string(object, "kernel_source");
    r.reasoning_trace = field::string(object, "reasoning_trace");

    auto tokens = object.find("reasoning_tokens");
    if (tokens != object.end() && !tokens->is_null()) {
        r.reasoning_tokens = field::integer(object, "reasoning_tokens");
        if (auto approx = object.find("reasoning_tokens_approximate");
            approx != object.end() && approx->is_boolean()) {
            r.tokens_approximate = approx->get<bool>();
        }
    } else if (options.approximate_tokens) {
        r.reasoning_tokens = approximate_token_count(r.reasoning_trace);
        r.tokens_approximate = true;
    } else {
        throw Error("missing required field \"reasoning_tokens\"");
    }
    if (r.reasoning_tokens < 0) throw Error("reasoning_tokens must be >= 0");
    if (r.reasoning_trace.empty() && r.reasoning_tokens != 0) {
        throw Error("reasoning_tokens must be 0 when reasoning_trace is empty");
    }

    if (auto type = object.find("task_type"); type != object.end() && !type->is_null()) {
        auto parsed = parse_task_type(field::string(object, "task_type"));
        if (!parsed) throw Error("unknown task_type \"" + type->get<std::string>() + "\"");
        r.task_type = *parsed;
    }
    r.extra = collect_extra(object, kRecordFields);
    return r;
}

OrderedJson record_to_json(const GenerationRecord& r) {
    OrderedJson out;
    out["version"] = kRecordFormatVersion;
    out["task_id"] = r.task_id;
    out["gen_index"] = r.gen_index;
    out["task_type"] = std::string(to_string(r.task_type));
    out["reasoning_tokens"] = r.reasoning_tokens;
    if (r.tokens_approximate) out["reasoning_tokens_approximate"] = true;
    out["task_source"] = r.task_source;
    out["kernel_source"] = r.kernel_source;
    out["reasoning_trace"] = r.reasoning_trace;
    append_extra(out, r.extra);
    return out;
}

EvalResult eval_from_json(const Json& object) {
    check_version(object);
    EvalResult e;
    e.task_id = field::string(object, "task_id");
    e.gen_index = field::integer(object, "gen_index");
    const std::string status = field::string(object, "status");
    auto parsed = parse_status(status);
    if (!parsed) throw Error("unknown status \"" + status + "\"");
    e.status = *parsed;
    e.t_ref_ms = optional_time(object, "t_ref_ms");
    e.t_kernel_ms = optional_time(object, "t_kernel_ms");
    e.speedup = field::real(object, "speedup");
    if (auto d = object.find("diagnostics"); d != object.end() && !d->is_null()) {
        e.diagnostics = field::string(object, "diagnostics");
    }
    e.config_hash = field::string(object, "config_hash");
    e.extra = collect_extra(object, kEvalFields);
    validate_eval(e);
    return e;
}

OrderedJson eval_to_json(const EvalResult& e) {
    OrderedJson out;
    out["version"] = kRecordFormatVersion;
    out["task_id"] = e.task_id;
    out["gen_index"] = e.gen_index;
    out["status"] = std::string(to_string(e.status));
    if (e.t_ref_ms) out["t_ref_ms"] = *e.t_ref_ms;
    if (e.t_kernel_ms) out["t_kernel_ms"] = *e.t_kernel_ms;
    out["speedup"] = e.speedup;
    out["diagnostics"] = e.diagnostics;
    out["config_hash"] = e.config_hash;
    append_extra(out, e.extra);
    return out;
}

void validate_eval(const EvalResult& e) {
    const std::string where = to_string(e.key());
    if (!std::isfinite(e.speedup) || e.speedup < 0.0) {
        throw ValidationError(where + ": speedup must be finite and >= 0");
    }
    if (e.status == Status::correct) {
        if (!e.t_ref_ms || !e.t_kernel_ms || !(*e.t_ref_ms > 0.0) || !(*e.t_kernel_ms > 0.0)) {
            throw ValidationError(where + ": correct eval needs positive t_ref_ms and t_kernel_ms");
        }
        const double expected = *e.t_ref_ms / *e.t_kernel_ms;
        if (!(e.speedup > 0.0) || std::abs(e.speedup - expected) > 1e-9 * expected) {
            throw ValidationError(where + ": speedup must equal t_ref_ms / t_kernel_ms");
        }
    } else if (e.speedup != 0.0) {
        throw ValidationError(where + ": speedup must be 0 unless status is correct");
    }
}

std::vector<GenerationRecord> read_records(const std::filesystem::path& path,
                                           const ReadOptions& options) {
    std::vector<GenerationRecord> records;
    std::map<RecordKey, std::size_t> first_line;
    for_each_json_line(path, [&](Json&& object, std::size_t line) {
        GenerationRecord r = record_from_json(object, options);
        auto [it, inserted] = first_line.emplace(r.key(), line);
        if (!inserted) {
            throw ParseError(path.string(), line,
                             "duplicate key " + to_string(r.key()) + " (first seen on line " +
                                 std::to_string(it->second) + ")");
        }
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<EvalResult> read_evals(const std::filesystem::path& path) {
    std::vector<EvalResult> evals;
    for_each_json_line(path, [&](Json&& object, std::size_t) {
        evals.push_back(eval_from_json(object));
    });
    return evals;
}

std::string format_records(const std::vector<GenerationRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += dump_line(record_to_json(r));
        out += '\n';
    }
    return out;
}

std::string format_evals(const std::vector<EvalResult>& evals) {
    std::string out;
    for (const auto& e : evals) {
        out += dump_line(eval_to_json(e));
        out += '\n';
    }
    return out;
}

void write_records(const std::filesystem::path& path, const std::vector<GenerationRecord>& records) {
    write_file_atomic(path, format_records(records));
}

void write_evals(const std::filesystem::path& path, const std::vector<EvalResult>& evals) {
    write_file_atomic(path, format_evals(evals));
}

GroupingResult group_by_task(const std::vector<GenerationRecord>& records,
                             const std::vector<EvalResult>& evals) {
    std::map<RecordKey, std::size_t> record_index;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!record_index.emplace(records[i].key(), i).second) {
            throw ValidationError("duplicate record " + to_string(records[i].key()));
        }
    }

    std::map<RecordKey, const EvalResult*> joined;
    for (const auto& e : evals) {
        const RecordKey key = e.key();
        if (!record_index.count(key)) {
            throw ValidationError("eval " + to_string(key) + " has no matching record");
        }
        auto [it, inserted] = joined.emplace(key, &e);
        if (!inserted && it->second->config_hash != e.config_hash) {
            throw ValidationError("record " + to_string(key) +
                                  " evaluated twice with differing config_hash");
        }
    }

    std::map<std::string, TaskGroup> by_task;
    GroupingResult result;
    for (const auto& r : records) {
        auto it = joined.find(r.key());
        if (it == joined.end()) {
            result.unevaluated.push_back(r.key());
            continue;
        }
        TaskGroup& g = by_task[r.task_id];
        g.task_id = r.task_id;
        if (g.task_type == TaskType::unknown) {
            g.task_type = r.task_type;
        } else if (r.task_type != TaskType::unknown && r.task_type != g.task_type) {
            throw ValidationError("task " + r.task_id + " has conflicting task_type tags");
        }
        g.items.push_back({r, *it->second});
    }

    result.groups.reserve(by_task.size());
    for (auto& [id, g] : by_task) {
        std::sort(g.items.begin(), g.items.end(), [](const auto& a, const auto& b) {
            return a.record.gen_index < b.record.gen_index;
        });
        result.groups.push_back(std::move(g));
    }
    return result;
}

std::vector<TaskGroupItem> flatten(const std::vector<TaskGroup>& groups) {
    std::vector<TaskGroupItem> out;
    for (const auto& g : groups) {
        out.insert(out.end(), g.items.begin(), g.items.end());
    }
    return out;
}

CountSummary count_summary(const std::vector<TaskGroup>& groups) {
    CountSummary s;
    for (const auto& g : groups) {
        ++s.n_tasks;
        bool any_correct = false;
        for (const auto& item : g.items) {
            ++s.n_generations;
            if (item.eval.status == Status::correct) {
                ++s.n_correct;
                any_correct = true;
            }
        }
        if (any_correct) ++s.n_tasks_with_correct;
    }
    return s;
}

}  // namespace kernelcur
