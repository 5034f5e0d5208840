#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kernelcur/records.hpp"

namespace kernelcur::metrics {

struct MetricConfig {
    std::vector<double> p_thresholds{1.0};
    int k = 10;

    // Throws DomainError unless thresholds are positive and ascending and k >= 1.
    void validate() const;
};

// Correctness-gated speedup: t_ref / t_kernel when correct, exactly 0 otherwise.
double speedup(double t_ref_ms, double t_kernel_ms, bool correct);

// Fraction of tasks whose speedup strictly exceeds p.
double fast_p(std::span<const double> speedups, double p);

double exec_rate(std::span<const Status> statuses);

// True iff any of the first k entries (callers pass them in gen_index order)
// is correct. Throws DomainError when fewer than k entries exist.
bool pass_at_k_exec(std::span<const Status> group_statuses, int k);

// True iff any of the first k speedups strictly exceeds p.
bool pass_at_k_fast(std::span<const double> group_speedups, int k, double p = 1.0);

inline bool pass_at_k_fast1(std::span<const double> group_speedups, int k) {
    return pass_at_k_fast(group_speedups, k, 1.0);
}

// Grand mean over a rectangular tasks x generations matrix of token counts.
double arl(const std::vector<std::vector<std::int64_t>>& lengths);

struct GeomeanResult {
    double value = 0.0;
    std::size_t n_used = 0;
    std::size_t n_zeros_excluded = 0;
};

// Geometric mean via mean of logs. With include_zeros = false, zero entries
// are dropped and counted; with include_zeros = true any zero yields 0.
GeomeanResult geomean_speedup(std::span<const double> speedups, bool include_zeros = false);

}  // namespace kernelcur::metrics
