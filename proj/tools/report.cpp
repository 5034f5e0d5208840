#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>

#include "kernelcur/metrics.hpp"

namespace kernelcur::cli {

namespace {

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string percent(std::optional<double> v) {
    return v ? format("%.1f%%", *v * 100.0) : "n/a";
}

std::string level_of(const TaskGroup& g) {
    for (const auto& item : g.items) {
        auto it = item.record.extra.find("level");
        if (it == item.record.extra.end() || it->is_null()) continue;
        return it->is_string() ? it->get<std::string>() : it->dump();
    }
    return {};
}

struct Column {
    std::string name;
    std::vector<const TaskGroup*> groups;
};

std::vector<std::string> column_values(const Column& col, const ReportOptions& opt) {
    std::vector<Status> statuses;
    std::vector<double> speedups;
    bool all_have_k = !col.groups.empty();
    for (const TaskGroup* g : col.groups) {
        for (const auto& item : g->items) {
            statuses.push_back(item.eval.status);
            speedups.push_back(item.eval.speedup);
        }
        if (g->items.size() < static_cast<std::size_t>(opt.k)) all_have_k = false;
    }

    std::vector<std::string> rows;
    rows.push_back(std::to_string(col.groups.size()));
    rows.push_back(std::to_string(statuses.size()));
    const bool any = !statuses.empty();
    rows.push_back(percent(any ? std::optional(metrics::exec_rate(statuses)) : std::nullopt));
    for (double p : opt.p_thresholds) {
        rows.push_back(percent(any ? std::optional(metrics::fast_p(speedups, p)) : std::nullopt));
    }

    auto pass_rate = [&](auto predicate) -> std::optional<double> {
        if (!all_have_k) return std::nullopt;
        std::size_t hits = 0;
        for (const TaskGroup* g : col.groups) hits += predicate(*g);
        return static_cast<double>(hits) / static_cast<double>(col.groups.size());
    };
    rows.push_back(percent(pass_rate([&](const TaskGroup& g) {
        std::vector<Status> s;
        for (const auto& item : g.items) s.push_back(item.eval.status);
        return metrics::pass_at_k_exec(s, opt.k);
    })));
    for (double p : opt.p_thresholds) {
        rows.push_back(percent(pass_rate([&](const TaskGroup& g) {
            std::vector<double> s;
            for (const auto& item : g.items) s.push_back(item.eval.speedup);
            return metrics::pass_at_k_fast(s, opt.k, p);
        })));
    }

    const bool positive = std::any_of(speedups.begin(), speedups.end(),
                                      [](double s) { return s > 0.0; });
    if (any && (positive || opt.include_zeros)) {
        const auto g = metrics::geomean_speedup(speedups, opt.include_zeros);
        rows.push_back(format("%.3f", g.value));
        rows.push_back(std::to_string(g.n_zeros_excluded));
    } else {
        rows.push_back("n/a");
        rows.push_back(std::to_string(speedups.size()));
    }
    return rows;
}

}  // namespace

std::string render_report(const std::vector<TaskGroup>& groups, const ReportOptions& opt) {
    std::vector<Column> columns{{"all", {}}};
    std::map<std::string, std::vector<const TaskGroup*>> levels;
    for (const auto& g : groups) {
        columns.front().groups.push_back(&g);
        if (auto level = level_of(g); !level.empty()) levels[level].push_back(&g);
    }
    for (auto& [name, gs] : levels) columns.push_back({"level " + name, std::move(gs)});

    std::vector<std::string> labels{"n_tasks", "n_generations", "Exec"};
    for (double p : opt.p_thresholds) labels.push_back("fast_" + format("%g", p));
    const std::string pass = "pass@" + std::to_string(opt.k) + " ";
    labels.push_back(pass + "Exec");
    for (double p : opt.p_thresholds) labels.push_back(pass + "fast_" + format("%g", p));
    labels.push_back("G_speedup");
    labels.push_back("G_speedup zeros");

    std::vector<std::vector<std::string>> cells;
    for (const auto& col : columns) cells.push_back(column_values(col, opt));

    std::size_t label_width = std::string("metric").size();
    for (const auto& l : labels) label_width = std::max(label_width, l.size());
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::size_t w = columns[c].name.size();
        for (const auto& v : cells[c]) w = std::max(w, v.size());
        widths.push_back(w);
    }

    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    std::string out = "# kernelcur report\n";
    out += "# evals: " + opt.source + "\n";
    out += "# pass@1 rows treat every generation as a trial; pass@k rows need >= k generations per task\n";
    out += std::string("# G_speedup: geometric mean over ") +
           (opt.include_zeros ? "all speedups (zeros included)" : "positive speedups") + "\n";
    out += pad("metric", label_width);
    for (std::size_t c = 0; c < columns.size(); ++c) out += "  " + pad(columns[c].name, widths[c]);
    out += "\n";
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out += pad(labels[r], label_width);
        for (std::size_t c = 0; c < columns.size(); ++c) out += "  " + pad(cells[c][r], widths[c]);
        out += "\n";
    }
    // Strip trailing pad spaces for stable diffs.
    std::string cleaned;
    std::size_t start = 0;
    while (start < out.size()) {
        std::size_t nl = out.find('\n', start);
        std::string line = out.substr(start, nl - start);
        line.erase(line.find_last_not_of(' ') + 1);
        cleaned += line + "\n";
        start = nl + 1;
    }
    return cleaned;
}

}  // namespace kernelcur::cli
