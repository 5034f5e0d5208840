#include "kernelcur/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernelcur/error.hpp"
#include "kernelcur/special_functions.hpp"

namespace kernelcur::analysis {

std::vector<BinStat> accuracy_by_length_bins(std::span<const LengthOutcome> pairs,
                                             std::int64_t bin_width) {
    if (pairs.empty()) throw DomainError("accuracy_by_length_bins: empty input");
    if (bin_width <= 0) throw DomainError("accuracy_by_length_bins: bin_width must be > 0");

    std::int64_t max_len = 0;
    for (const auto& p : pairs) {
        if (p.reasoning_tokens < 0) throw DomainError("accuracy_by_length_bins: negative length");
        max_len = std::max(max_len, p.reasoning_tokens);
    }
    const std::size_t n_bins = static_cast<std::size_t>(max_len / bin_width) + 1;
    std::vector<BinStat> bins(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        bins[i].lo = static_cast<std::int64_t>(i) * bin_width;
        bins[i].hi = bins[i].lo + bin_width;
    }
    for (const auto& p : pairs) {
        BinStat& b = bins[static_cast<std::size_t>(p.reasoning_tokens / bin_width)];
        ++b.n;
        if (p.correct) ++b.n_correct;
    }
    for (auto& b : bins) {
        if (b.n > 0) b.accuracy = static_cast<double>(b.n_correct) / static_cast<double>(b.n);
    }
    return bins;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile: empty input");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStat box_stats(std::span<const double> values) {
    if (values.empty()) throw DomainError("box_stats: empty group");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxStat s;
    s.n = static_cast<std::int64_t>(sorted.size());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.5);
    s.q3 = quantile_sorted(sorted, 0.75);

    const double iqr = s.q3 - s.q1;
    const double fence_lo = s.q1 - 1.5 * iqr;
    const double fence_hi = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.q1;
    s.whisker_hi = s.q3;
    for (double v : sorted) {
        if (v < fence_lo || v > fence_hi) {
            ++s.n_outliers;
            continue;
        }
        s.whisker_lo = std::min(s.whisker_lo, v);
        s.whisker_hi = std::max(s.whisker_hi, v);
    }
    return s;
}

std::pair<BoxStat, BoxStat> box_stats(std::span<const double> values,
                                      const std::vector<bool>& split) {
    if (values.size() != split.size()) throw DomainError("box_stats: length mismatch");
    std::vector<double> yes;
    std::vector<double> no;
    for (std::size_t i = 0; i < values.size(); ++i) {
        (split[i] ? yes : no).push_back(values[i]);
    }
    return {box_stats(yes), box_stats(no)};
}

CorrStat pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("pearson: length mismatch");
    if (x.size() < 3) throw DomainError("pearson: need at least 3 points");

    // Streaming co-moments (Welford); stable for large offsets.
    double mean_x = 0.0;
    double mean_y = 0.0;
    double m2_x = 0.0;
    double m2_y = 0.0;
    double c_xy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double dx = x[i] - mean_x;
        mean_x += dx / n;
        const double dy = y[i] - mean_y;
        mean_y += dy / n;
        m2_x += dx * (x[i] - mean_x);
        m2_y += dy * (y[i] - mean_y);
        c_xy += dx * (y[i] - mean_y);
    }
    if (!(m2_x > 0.0) || !(m2_y > 0.0)) throw DomainError("pearson: zero variance");

    CorrStat out;
    out.n = static_cast<std::int64_t>(x.size());
    out.r = std::clamp(c_xy / std::sqrt(m2_x * m2_y), -1.0, 1.0);
    const double dof = static_cast<double>(out.n - 2);
    const double one_minus_r2 = 1.0 - out.r * out.r;
    if (one_minus_r2 <= 0.0) {
        out.t_stat = std::copysign(std::numeric_limits<double>::infinity(), out.r);
        out.p_value = 0.0;
        return out;
    }
    out.t_stat = out.r * std::sqrt(dof / one_minus_r2);
    out.p_value = special::student_t_two_sided(out.t_stat, dof);
    return out;
}

namespace {

OrderedJson to_json(const BinStat& b) {
    OrderedJson j;
    j["lo"] = b.lo;
    j["hi"] = b.hi;
    j["n"] = b.n;
    j["n_correct"] = b.n_correct;
    j["accuracy"] = b.accuracy ? OrderedJson(*b.accuracy) : OrderedJson(nullptr);
    return j;
}

OrderedJson to_json(const BoxStat& s) {
    OrderedJson j;
    j["n"] = s.n;
    j["min"] = s.min;
    j["q1"] = s.q1;
    j["median"] = s.median;
    j["q3"] = s.q3;
    j["max"] = s.max;
    j["whisker_lo"] = s.whisker_lo;
    j["whisker_hi"] = s.whisker_hi;
    j["n_outliers"] = s.n_outliers;
    return j;
}

OrderedJson to_json(const CorrStat& c) {
    OrderedJson j;
    j["r"] = c.r;
    j["n"] = c.n;
    // JSON has no infinity; a perfect correlation reports t as null.
    j["t_stat"] = std::isfinite(c.t_stat) ? OrderedJson(c.t_stat) : OrderedJson(nullptr);
    j["p_value"] = c.p_value;
    return j;
}

OrderedJson correlation_or_reason(const std::vector<double>& x, const std::vector<double>& y) {
    try {
        return to_json(pearson(x, y));
    } catch (const DomainError& e) {
        OrderedJson j;
        j["n"] = static_cast<std::int64_t>(x.size());
        j["error"] = e.what();
        return j;
    }
}

OrderedJson box_or_null(const std::vector<double>& values) {
    if (values.empty()) return OrderedJson(nullptr);
    return to_json(box_stats(values));
}

}  // namespace

OrderedJson analysis_report(const std::vector<TaskGroup>& groups, const AnalysisConfig& cfg) {
    std::vector<LengthOutcome> outcomes;
    std::vector<double> len_correct;
    std::vector<double> len_incorrect;
    std::vector<double> corr_x_correct;
    std::vector<double> corr_y_correct;
    std::vector<double> corr_x_all;
    std::vector<double> corr_y_all;
    for (const auto& g : groups) {
        for (const auto& item : g.items) {
            const bool ok = item.eval.status == Status::correct;
            const auto tokens = item.record.reasoning_tokens;
            outcomes.push_back({tokens, ok});
            (ok ? len_correct : len_incorrect).push_back(static_cast<double>(tokens));
            corr_x_all.push_back(static_cast<double>(tokens));
            corr_y_all.push_back(item.eval.speedup);
            if (ok) {
                corr_x_correct.push_back(static_cast<double>(tokens));
                corr_y_correct.push_back(item.eval.speedup);
            }
        }
    }

    OrderedJson report;
    OrderedJson config;
    config["bin_width"] = cfg.bin_width;
    config["quantile_method"] = "type7";
    config["whisker_rule"] = "1.5*IQR";
    config["correlation_primary"] = cfg.include_incorrect ? "all" : "correct_only";
    report["config"] = std::move(config);
    report["n_generations"] = static_cast<std::int64_t>(outcomes.size());
    report["n_correct"] = static_cast<std::int64_t>(len_correct.size());

    OrderedJson bins = OrderedJson::array();
    if (!outcomes.empty()) {
        for (const auto& b : accuracy_by_length_bins(outcomes, cfg.bin_width)) {
            bins.push_back(to_json(b));
        }
    }
    report["length_bins"] = std::move(bins);

    OrderedJson box;
    box["correct"] = box_or_null(len_correct);
    box["incorrect"] = box_or_null(len_incorrect);
    report["length_box"] = std::move(box);

    OrderedJson corr;
    corr["correct_only"] = correlation_or_reason(corr_x_correct, corr_y_correct);
    corr["all"] = correlation_or_reason(corr_x_all, corr_y_all);
    report["length_speedup_correlation"] = std::move(corr);
    return report;
}

}  // namespace kernelcur::analysis
