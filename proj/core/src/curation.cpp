#include "kernelcur/curation.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <regex>

#include "kernelcur/error.hpp"

namespace kernelcur::curation {

namespace {

bool is_selectable(const TaskGroupItem& item) {
    return item.eval.status == Status::correct && item.eval.speedup > 0.0;
}

CuratedSample make_sample(const TaskGroupItem& item, std::optional<Part> part, Policy policy) {
    return {item.record.task_id, item.record.gen_index, part, policy, item.eval.speedup,
            item.record.reasoning_tokens};
}

bool sample_order(const CuratedSample& a, const CuratedSample& b) {
    return std::tie(a.part, a.task_id, a.gen_index) < std::tie(b.part, b.task_id, b.gen_index);
}

// Highest speedup, then shortest reasoning, then lowest gen_index.
bool better_by_speedup(const TaskGroupItem& a, const TaskGroupItem& b) {
    if (a.eval.speedup != b.eval.speedup) return a.eval.speedup > b.eval.speedup;
    if (a.record.reasoning_tokens != b.record.reasoning_tokens) {
        return a.record.reasoning_tokens < b.record.reasoning_tokens;
    }
    return a.record.gen_index < b.record.gen_index;
}

const TaskGroupItem* pick_best(const TaskGroup& g, auto better) {
    const TaskGroupItem* best = nullptr;
    for (const auto& item : g.items) {
        if (!is_selectable(item)) continue;
        if (!best || better(item, *best)) best = &item;
    }
    return best;
}

// Uniform integer in [0, n) from the raw engine output; std distributions are
// implementation-defined and would break cross-platform reproducibility.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % n;
    }
}

std::vector<CuratedSample> select_ablation(const std::vector<TaskGroup>& groups,
                                           const CurationConfig& cfg, CurationResult& result) {
    struct Candidate {
        const TaskGroupItem* item;
    };
    std::vector<Candidate> candidates;
    std::mt19937_64 rng(cfg.seed);

    for (const auto& g : groups) {
        const TaskGroupItem* chosen = nullptr;
        switch (cfg.policy) {
            case Policy::random: {
                std::vector<const TaskGroupItem*> pool;
                for (const auto& item : g.items) {
                    if (is_selectable(item)) pool.push_back(&item);
                }
                if (!pool.empty()) chosen = pool[uniform_below(rng, pool.size())];
                break;
            }
            case Policy::max_len:
                chosen = pick_best(g, [](const TaskGroupItem& a, const TaskGroupItem& b) {
                    if (a.record.reasoning_tokens != b.record.reasoning_tokens) {
                        return a.record.reasoning_tokens > b.record.reasoning_tokens;
                    }
                    return a.record.gen_index < b.record.gen_index;
                });
                break;
            case Policy::min_len:
                chosen = pick_best(g, [](const TaskGroupItem& a, const TaskGroupItem& b) {
                    if (a.record.reasoning_tokens != b.record.reasoning_tokens) {
                        return a.record.reasoning_tokens < b.record.reasoning_tokens;
                    }
                    return a.record.gen_index < b.record.gen_index;
                });
                break;
            case Policy::speedup_first:
                chosen = pick_best(g, better_by_speedup);
                break;
            case Policy::concur:
                break;
        }
        if (chosen) candidates.push_back({chosen});
    }

    result.n_tasks_eligible = static_cast<std::int64_t>(candidates.size());
    std::size_t keep = static_cast<std::size_t>(cfg.target_size);
    if (keep > candidates.size()) {
        result.warnings.push_back("target_size " + std::to_string(cfg.target_size) +
                                  " exceeds " + std::to_string(candidates.size()) +
                                  " eligible tasks; clamped");
        keep = candidates.size();
    }

    auto by_task = [](const Candidate& a, const Candidate& b) {
        return a.item->record.task_id < b.item->record.task_id;
    };
    switch (cfg.policy) {
        case Policy::random:
            for (std::size_t i = 0; i < keep; ++i) {
                const std::size_t j = i + uniform_below(rng, candidates.size() - i);
                std::swap(candidates[i], candidates[j]);
            }
            break;
        case Policy::max_len:
            std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
                return a.item->record.reasoning_tokens > b.item->record.reasoning_tokens;
            });
            break;
        case Policy::min_len:
            std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
                return a.item->record.reasoning_tokens < b.item->record.reasoning_tokens;
            });
            break;
        case Policy::speedup_first:
            std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
                return a.item->eval.speedup > b.item->eval.speedup;
            });
            break;
        case Policy::concur:
            break;
    }
    candidates.resize(keep);
    std::sort(candidates.begin(), candidates.end(), by_task);

    std::vector<CuratedSample> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back(make_sample(*c.item, std::nullopt, cfg.policy));
    }
    return out;
}

const std::set<std::string>& non_compute_calls() {
    static const std::set<std::string> names = {
        "arange", "device", "empty", "float16", "float32", "float64", "from_numpy", "full",
        "manual_seed", "module", "moduledict", "modulelist", "no_grad", "ones", "parameter",
        "parameterlist", "rand", "randint", "randn", "sequential", "size", "tensor", "zeros",
        "zeros_like", "ones_like", "empty_like", "randn_like", "identity", "cuda", "to",
    };
    return names;
}

}  // namespace

std::string_view to_string(Part part) {
    switch (part) {
        case Part::A_short_and_fast: return "A_short_and_fast";
        case Part::B_high_speedup: return "B_high_speedup";
        case Part::C_single_op_balance: return "C_single_op_balance";
    }
    return "A_short_and_fast";
}

std::string_view to_string(Policy policy) {
    switch (policy) {
        case Policy::concur: return "concur";
        case Policy::random: return "random";
        case Policy::max_len: return "max_len";
        case Policy::min_len: return "min_len";
        case Policy::speedup_first: return "speedup_first";
    }
    return "concur";
}

std::optional<Part> parse_part(std::string_view text) {
    for (Part p : {Part::A_short_and_fast, Part::B_high_speedup, Part::C_single_op_balance}) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

std::optional<Policy> parse_policy(std::string_view text) {
    for (Policy p : {Policy::concur, Policy::random, Policy::max_len, Policy::min_len,
                     Policy::speedup_first}) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

void CurationConfig::validate() const {
    if (!(speedup_threshold > 0.0)) throw DomainError("speedup_threshold must be > 0");
    if (single_op_target < 0) throw DomainError("single_op_target must be >= 0");
    if (target_size < 1) throw DomainError("target_size must be >= 1");
}

std::optional<CuratedSample> select_part_a(const TaskGroup& group) {
    if (group.items.empty()) return std::nullopt;
    // Items are in gen_index order, so the first minimum wins ties.
    const TaskGroupItem* shortest = &group.items.front();
    for (const auto& item : group.items) {
        if (item.record.reasoning_tokens < shortest->record.reasoning_tokens) shortest = &item;
    }
    if (!is_selectable(*shortest)) return std::nullopt;
    for (const auto& item : group.items) {
        if (item.eval.speedup > shortest->eval.speedup) return std::nullopt;
    }
    return make_sample(*shortest, Part::A_short_and_fast, Policy::concur);
}

std::vector<CuratedSample> select_part_b(const std::vector<TaskGroup>& groups, double threshold,
                                         const std::set<RecordKey>& already) {
    if (!(threshold > 0.0)) throw DomainError("select_part_b: threshold must be > 0");
    std::vector<CuratedSample> out;
    for (const auto& g : groups) {
        for (const auto& item : g.items) {
            if (is_selectable(item) && item.eval.speedup > threshold &&
                !already.count(item.record.key())) {
                out.push_back(make_sample(item, Part::B_high_speedup, Policy::concur));
            }
        }
    }
    std::sort(out.begin(), out.end(), sample_order);
    return out;
}

PartCResult select_part_c(const std::vector<TaskGroup>& groups, const std::set<RecordKey>& already,
                          std::int64_t target) {
    if (target < 0) throw DomainError("select_part_c: target must be >= 0");
    std::set<std::string> represented;
    for (const auto& key : already) represented.insert(key.task_id);

    PartCResult result;
    for (const auto& g : groups) {
        if (g.task_type == TaskType::unknown) {
            ++result.n_unknown_skipped;
            continue;
        }
        if (g.task_type != TaskType::single_op || represented.count(g.task_id)) continue;
        if (const TaskGroupItem* best = pick_best(g, better_by_speedup)) {
            result.samples.push_back(make_sample(*best, Part::C_single_op_balance, Policy::concur));
        }
    }
    std::sort(result.samples.begin(), result.samples.end(),
              [](const CuratedSample& a, const CuratedSample& b) {
                  if (a.speedup != b.speedup) return a.speedup > b.speedup;
                  return a.task_id < b.task_id;
              });
    if (target > 0 && result.samples.size() > static_cast<std::size_t>(target)) {
        result.samples.resize(static_cast<std::size_t>(target));
    }
    return result;
}

CurationResult curate(const std::vector<TaskGroup>& input, const CurationConfig& cfg) {
    cfg.validate();

    std::vector<TaskGroup> tagged;
    const std::vector<TaskGroup>* groups = &input;
    const auto by_id = [](const TaskGroup& a, const TaskGroup& b) { return a.task_id < b.task_id; };
    if (cfg.single_op_heuristic || !std::is_sorted(input.begin(), input.end(), by_id)) {
        tagged = input;
        std::sort(tagged.begin(), tagged.end(), by_id);
        groups = &tagged;
    }
    if (cfg.single_op_heuristic) {
        for (auto& g : tagged) {
            if (g.task_type == TaskType::unknown && !g.items.empty()) {
                g.task_type = classify_task_type_heuristic(g.items.front().record.task_source);
            }
        }
    }

    CurationResult result;
    if (cfg.policy != Policy::concur) {
        result.samples = select_ablation(*groups, cfg, result);
        return result;
    }

    std::set<RecordKey> taken;
    std::vector<CuratedSample> samples;
    for (const auto& g : *groups) {
        if (auto a = select_part_a(g)) {
            taken.insert(a->key());
            samples.push_back(std::move(*a));
        }
    }
    result.tallies.a = static_cast<std::int64_t>(samples.size());

    auto part_b = select_part_b(*groups, cfg.speedup_threshold, taken);
    for (const auto& s : part_b) taken.insert(s.key());
    result.tallies.b = static_cast<std::int64_t>(part_b.size());
    samples.insert(samples.end(), part_b.begin(), part_b.end());

    auto part_c = select_part_c(*groups, taken, cfg.single_op_target);
    result.tallies.c = static_cast<std::int64_t>(part_c.samples.size());
    result.n_unknown_skipped = part_c.n_unknown_skipped;
    samples.insert(samples.end(), part_c.samples.begin(), part_c.samples.end());
    if (part_c.n_unknown_skipped > 0) {
        result.warnings.push_back(std::to_string(part_c.n_unknown_skipped) +
                                  " tasks with unknown task_type skipped by part C");
    }

    for (const auto& g : *groups) {
        if (std::any_of(g.items.begin(), g.items.end(), is_selectable)) ++result.n_tasks_eligible;
    }
    std::sort(samples.begin(), samples.end(), sample_order);
    result.samples = std::move(samples);
    return result;
}

TaskType classify_task_type_heuristic(std::string_view task_source) {
    static const std::regex call(
        R"((?:^|[^\w.])(?:torch\.nn\.functional|torch\.nn|torch|nn|F)\.([A-Za-z_]\w*)(?=\s*\())");
    std::set<std::string> ops;
    const std::string text(task_source);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), call);
         it != std::sregex_iterator(); ++it) {
        std::string name = (*it)[1].str();
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!non_compute_calls().count(name)) ops.insert(std::move(name));
    }
    if (ops.empty()) return TaskType::unknown;
    return ops.size() == 1 ? TaskType::single_op : TaskType::multi_op;
}

namespace {

OrderedJson sample_to_json(const CuratedSample& s) {
    OrderedJson j;
    j["kind"] = "sample";
    j["version"] = kRecordFormatVersion;
    j["task_id"] = s.task_id;
    j["gen_index"] = s.gen_index;
    j["part"] = s.part ? OrderedJson(std::string(to_string(*s.part))) : OrderedJson(nullptr);
    j["policy"] = std::string(to_string(s.policy));
    j["speedup"] = s.speedup;
    j["reasoning_tokens"] = s.reasoning_tokens;
    return j;
}

CuratedSample sample_from_json(const Json& j) {
    CuratedSample s;
    s.task_id = field::string(j, "task_id");
    s.gen_index = field::integer(j, "gen_index");
    if (auto p = j.find("part"); p != j.end() && !p->is_null()) {
        auto part = parse_part(field::string(j, "part"));
        if (!part) throw Error("unknown part \"" + p->get<std::string>() + "\"");
        s.part = part;
    }
    auto policy = parse_policy(field::string(j, "policy"));
    if (!policy) throw Error("unknown policy");
    s.policy = *policy;
    s.speedup = field::real(j, "speedup");
    s.reasoning_tokens = field::integer(j, "reasoning_tokens");
    return s;
}

}  // namespace

std::string format_curated(const CurationResult& result, const CurationConfig& cfg) {
    OrderedJson header;
    header["kind"] = "header";
    header["version"] = kRecordFormatVersion;
    OrderedJson config;
    config["policy"] = std::string(to_string(cfg.policy));
    config["speedup_threshold"] = cfg.speedup_threshold;
    config["single_op_target"] = cfg.single_op_target;
    config["target_size"] = cfg.target_size;
    config["seed"] = cfg.seed;
    config["single_op_heuristic"] = cfg.single_op_heuristic;
    header["config"] = std::move(config);
    OrderedJson tallies;
    tallies["A"] = result.tallies.a;
    tallies["B"] = result.tallies.b;
    tallies["C"] = result.tallies.c;
    header["tallies"] = std::move(tallies);
    header["n_samples"] = static_cast<std::int64_t>(result.samples.size());
    header["n_tasks_eligible"] = result.n_tasks_eligible;
    header["n_unknown_skipped"] = result.n_unknown_skipped;
    header["warnings"] = result.warnings;

    std::string out = dump_line(header) + "\n";
    for (const auto& s : result.samples) {
        out += dump_line(sample_to_json(s));
        out += '\n';
    }
    return out;
}

void write_curated(const std::filesystem::path& path, const CurationResult& result,
                   const CurationConfig& cfg) {
    write_file_atomic(path, format_curated(result, cfg));
}

CuratedFile read_curated(const std::filesystem::path& path) {
    CuratedFile file;
    std::set<RecordKey> seen;
    for_each_json_line(path, [&](Json&& j, std::size_t line) {
        const std::string kind = field::string(j, "kind");
        if (kind == "header") {
            if (!file.header.is_null()) throw Error("second header line");
            file.header = std::move(j);
        } else if (kind == "sample") {
            CuratedSample s = sample_from_json(j);
            if (!seen.insert(s.key()).second) {
                throw ParseError(path.string(), line, "duplicate sample " + to_string(s.key()));
            }
            file.samples.push_back(std::move(s));
        } else {
            throw Error("unknown line kind \"" + kind + "\"");
        }
    });
    return file;
}

}  // namespace kernelcur::curation
