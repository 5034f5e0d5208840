#include "kernelcur/difficulty.hpp"

#include <algorithm>
#include <map>

#include "kernelcur/error.hpp"
#include "kernelcur/metrics.hpp"

namespace kernelcur::difficulty {

std::string_view to_string(Tier tier) {
    switch (tier) {
        case Tier::easy: return "easy";
        case Tier::medium: return "medium";
        case Tier::hard: return "hard";
    }
    return "medium";
}

void DifficultyConfig::validate() const {
    if (!(easy_max < hard_min)) throw DomainError("easy_max must be < hard_min");
    if (min_generations < 1) throw DomainError("min_generations must be >= 1");
}

double task_arl(const TaskGroup& group) {
    if (group.items.empty()) throw DomainError("task_arl: empty group " + group.task_id);
    std::vector<std::vector<std::int64_t>> row(1);
    for (const auto& item : group.items) row[0].push_back(item.record.reasoning_tokens);
    return metrics::arl(row);
}

Tier classify_arl(double arl, const DifficultyConfig& cfg) {
    if (arl < cfg.easy_max) return Tier::easy;
    if (arl > cfg.hard_min) return Tier::hard;
    return Tier::medium;
}

std::vector<DifficultyLabel> classify(const std::vector<TaskGroup>& groups,
                                      const DifficultyConfig& cfg) {
    cfg.validate();
    std::vector<DifficultyLabel> labels;
    labels.reserve(groups.size());
    for (const auto& g : groups) {
        if (g.items.empty()) continue;
        DifficultyLabel label;
        label.task_id = g.task_id;
        label.task_arl = task_arl(g);
        label.tier = classify_arl(label.task_arl, cfg);
        label.m_used = static_cast<std::int64_t>(g.items.size());
        label.low_confidence = label.m_used < cfg.min_generations;
        labels.push_back(std::move(label));
    }
    return labels;
}

std::array<TierStats, 3> tier_report(const std::vector<DifficultyLabel>& labels,
                                     const std::vector<TaskGroup>& groups,
                                     const TierReportOptions& options) {
    std::map<std::string, const TaskGroup*> by_id;
    for (const auto& g : groups) by_id[g.task_id] = &g;

    std::array<TierStats, 3> out{};
    std::array<std::vector<Status>, 3> statuses;
    std::array<std::vector<double>, 3> speedups;
    for (std::size_t t = 0; t < 3; ++t) out[t].tier = static_cast<Tier>(t);

    for (const auto& label : labels) {
        auto it = by_id.find(label.task_id);
        if (it == by_id.end() || it->second->items.empty()) {
            throw ValidationError("no evals for labeled task " + label.task_id);
        }
        const auto t = static_cast<std::size_t>(label.tier);
        ++out[t].n;
        std::vector<Status> task_status;
        std::vector<double> task_speedup;
        for (const auto& item : it->second->items) {
            task_status.push_back(item.eval.status);
            task_speedup.push_back(item.eval.speedup);
        }
        if (options.aggregation == TierAggregation::per_generation) {
            statuses[t].insert(statuses[t].end(), task_status.begin(), task_status.end());
            speedups[t].insert(speedups[t].end(), task_speedup.begin(), task_speedup.end());
        } else {
            const bool pass = metrics::pass_at_k_exec(task_status, options.k);
            statuses[t].push_back(pass ? Status::correct : Status::incorrect);
            const auto prefix = std::span<const double>(task_speedup).first(
                static_cast<std::size_t>(options.k));
            speedups[t].push_back(*std::max_element(prefix.begin(), prefix.end()));
        }
    }

    for (std::size_t t = 0; t < 3; ++t) {
        if (out[t].n == 0) continue;
        out[t].exec_rate = metrics::exec_rate(statuses[t]);
        const bool any_positive = std::any_of(speedups[t].begin(), speedups[t].end(),
                                              [](double s) { return s > 0.0; });
        if (any_positive || options.include_zeros) {
            const auto g = metrics::geomean_speedup(speedups[t], options.include_zeros);
            out[t].geomean_speedup = g.value;
            out[t].n_zeros_excluded = static_cast<std::int64_t>(g.n_zeros_excluded);
        } else {
            out[t].n_zeros_excluded = static_cast<std::int64_t>(speedups[t].size());
        }
    }
    return out;
}

namespace {

OrderedJson optional_number(const std::optional<double>& v) {
    return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

}  // namespace

std::string format_difficulty(const std::vector<DifficultyLabel>& labels,
                              const DifficultyConfig& cfg,
                              const std::optional<std::array<TierStats, 3>>& tiers,
                              const TierReportOptions& options) {
    OrderedJson summary;
    summary["kind"] = "summary";
    summary["version"] = kRecordFormatVersion;
    OrderedJson config;
    config["easy_max"] = cfg.easy_max;
    config["hard_min"] = cfg.hard_min;
    config["min_generations"] = cfg.min_generations;
    config["boundary_rule"] = "easy: arl < easy_max; hard: arl > hard_min; medium otherwise";
    summary["config"] = std::move(config);

    std::array<std::int64_t, 3> counts{};
    std::int64_t low_confidence = 0;
    for (const auto& l : labels) {
        ++counts[static_cast<std::size_t>(l.tier)];
        if (l.low_confidence) ++low_confidence;
    }
    OrderedJson tier_counts;
    for (std::size_t t = 0; t < 3; ++t) {
        tier_counts[std::string(to_string(static_cast<Tier>(t)))] = counts[t];
    }
    summary["n_tasks"] = static_cast<std::int64_t>(labels.size());
    summary["tier_counts"] = std::move(tier_counts);
    summary["n_low_confidence"] = low_confidence;

    if (tiers) {
        OrderedJson report;
        report["aggregation"] = options.aggregation == TierAggregation::per_generation
                                    ? "per_generation"
                                    : "pass_at_" + std::to_string(options.k);
        report["geomean_zero_handling"] = options.include_zeros ? "include" : "exclude";
        OrderedJson rows = OrderedJson::array();
        for (const auto& s : *tiers) {
            OrderedJson row;
            row["tier"] = std::string(to_string(s.tier));
            row["n"] = s.n;
            row["exec_rate"] = optional_number(s.exec_rate);
            row["geomean_speedup"] = optional_number(s.geomean_speedup);
            row["n_zeros_excluded"] = s.n_zeros_excluded;
            rows.push_back(std::move(row));
        }
        report["tiers"] = std::move(rows);
        summary["tier_report"] = std::move(report);
    }

    std::string out = dump_line(summary) + "\n";
    for (const auto& l : labels) {
        OrderedJson j;
        j["kind"] = "label";
        j["task_id"] = l.task_id;
        j["task_arl"] = l.task_arl;
        j["tier"] = std::string(to_string(l.tier));
        j["m_used"] = l.m_used;
        j["low_confidence"] = l.low_confidence;
        out += dump_line(j);
        out += '\n';
    }
    return out;
}

}  // namespace kernelcur::difficulty
