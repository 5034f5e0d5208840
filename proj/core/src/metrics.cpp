#include "kernelcur/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kernelcur/error.hpp"

namespace kernelcur::metrics {

namespace {

void require_non_empty(std::size_t n, const char* what) {
    if (n == 0) throw DomainError(std::string(what) + ": empty input");
}

void require_k(std::size_t n, int k, const char* what) {
    if (k < 1) throw DomainError(std::string(what) + ": k must be >= 1");
    if (n < static_cast<std::size_t>(k)) {
        throw DomainError(std::string(what) + ": group has " + std::to_string(n) +
                          " entries, fewer than k = " + std::to_string(k));
    }
}

}  // namespace

void MetricConfig::validate() const {
    if (k < 1) throw DomainError("k must be >= 1");
    for (std::size_t i = 0; i < p_thresholds.size(); ++i) {
        if (!(p_thresholds[i] > 0.0) || !std::isfinite(p_thresholds[i])) {
            throw DomainError("p thresholds must be finite and > 0");
        }
        if (i > 0 && p_thresholds[i] < p_thresholds[i - 1]) {
            throw DomainError("p thresholds must be sorted ascending");
        }
    }
}

double speedup(double t_ref_ms, double t_kernel_ms, bool correct) {
    if (!(t_ref_ms > 0.0) || !(t_kernel_ms > 0.0) || !std::isfinite(t_ref_ms) ||
        !std::isfinite(t_kernel_ms)) {
        throw DomainError("speedup: times must be finite and strictly positive");
    }
    return correct ? t_ref_ms / t_kernel_ms : 0.0;
}

double fast_p(std::span<const double> speedups, double p) {
    require_non_empty(speedups.size(), "fast_p");
    if (!(p > 0.0)) throw DomainError("fast_p: p must be > 0");
    const auto hits = std::count_if(speedups.begin(), speedups.end(),
                                    [p](double s) { return s > p; });
    return static_cast<double>(hits) / static_cast<double>(speedups.size());
}

double exec_rate(std::span<const Status> statuses) {
    require_non_empty(statuses.size(), "exec_rate");
    const auto hits = std::count(statuses.begin(), statuses.end(), Status::correct);
    return static_cast<double>(hits) / static_cast<double>(statuses.size());
}

bool pass_at_k_exec(std::span<const Status> group_statuses, int k) {
    require_k(group_statuses.size(), k, "pass_at_k_exec");
    const auto prefix = group_statuses.first(static_cast<std::size_t>(k));
    return std::find(prefix.begin(), prefix.end(), Status::correct) != prefix.end();
}

bool pass_at_k_fast(std::span<const double> group_speedups, int k, double p) {
    require_k(group_speedups.size(), k, "pass_at_k_fast");
    const auto prefix = group_speedups.first(static_cast<std::size_t>(k));
    return std::any_of(prefix.begin(), prefix.end(), [p](double s) { return s > p; });
}

double arl(const std::vector<std::vector<std::int64_t>>& lengths) {
    if (lengths.empty() || lengths.front().empty()) {
        throw DomainError("arl: empty matrix");
    }
    const std::size_t cols = lengths.front().size();
    double total = 0.0;
    for (const auto& row : lengths) {
        if (row.size() != cols) throw DomainError("arl: ragged matrix");
        for (std::int64_t v : row) {
            if (v < 0) throw DomainError("arl: negative length");
            total += static_cast<double>(v);
        }
    }
    return total / (static_cast<double>(lengths.size()) * static_cast<double>(cols));
}

GeomeanResult geomean_speedup(std::span<const double> speedups, bool include_zeros) {
    require_non_empty(speedups.size(), "geomean_speedup");
    GeomeanResult out;
    double log_sum = 0.0;
    for (double s : speedups) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw DomainError("geomean_speedup: entries must be finite and >= 0");
        }
        if (s == 0.0) {
            ++out.n_zeros_excluded;
            continue;
        }
        log_sum += std::log(s);
        ++out.n_used;
    }
    if (include_zeros) {
        if (out.n_zeros_excluded > 0) {
            out.n_used = speedups.size();
            out.n_zeros_excluded = 0;
            out.value = 0.0;
            return out;
        }
    } else if (out.n_used == 0) {
        throw DomainError("geomean_speedup: no positive entries");
    }
    out.value = std::exp(log_sum / static_cast<double>(out.n_used));
    return out;
}

}  // namespace kernelcur::metrics
