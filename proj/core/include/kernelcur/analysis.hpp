#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kernelcur/jsonl.hpp"
#include "kernelcur/records.hpp"

namespace kernelcur::analysis {

struct LengthOutcome {
    std::int64_t reasoning_tokens = 0;
    bool correct = false;
};

// Half-open token range [lo, hi).
struct BinStat {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t n = 0;
    std::int64_t n_correct = 0;
    std::optional<double> accuracy;
};

struct BoxStat {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::int64_t n_outliers = 0;
    std::int64_t n = 0;
};

struct CorrStat {
    double r = 0.0;
    std::int64_t n = 0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

inline constexpr std::int64_t kDefaultBinWidth = 1000;

// Contiguous bins from 0 through the longest trace; empty bins keep accuracy unset.
std::vector<BinStat> accuracy_by_length_bins(std::span<const LengthOutcome> pairs,
                                             std::int64_t bin_width = kDefaultBinWidth);

// Type-7 (linear interpolation) quantile of already-sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

BoxStat box_stats(std::span<const double> values);

// Splits `values` by `split` and returns {true group, false group}.
std::pair<BoxStat, BoxStat> box_stats(std::span<const double> values,
                                      const std::vector<bool>& split);

// Product-moment correlation with a two-sided Student-t p-value on n - 2 dof.
CorrStat pearson(std::span<const double> x, std::span<const double> y);

struct AnalysisConfig {
    std::int64_t bin_width = kDefaultBinWidth;
    // Selects which correlation is reported as primary; both are always computed.
    bool include_incorrect = false;
};

// The numbers behind the length/accuracy and length/speedup observations,
// serialized as a single JSON object.
OrderedJson analysis_report(const std::vector<TaskGroup>& groups, const AnalysisConfig& cfg);

}  // namespace kernelcur::analysis
