#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "kernelcur/jsonl.hpp"

namespace kernelcur {

enum class TimingAggregation { median, mean };
enum class Device { gpu, cpu };

std::string_view to_string(TimingAggregation agg);
std::string_view to_string(Device device);
std::optional<TimingAggregation> parse_timing_aggregation(std::string_view text);
std::optional<Device> parse_device(std::string_view text);

// Parameters forwarded to the runner for one evaluation. Tolerances and
// iteration counts are conventions, never interpreted by the harness itself.
struct RunConfig {
    std::int64_t warmup_iters = 3;
    std::int64_t timed_iters = 10;
    TimingAggregation timing_agg = TimingAggregation::median;
    std::int64_t n_input_seeds = 5;
    double atol = 1e-2;
    double rtol = 1e-2;
    double timeout_s = 300.0;
    Device device = Device::gpu;

    void validate() const;

    // Fixed key order; the basis of config_hash.
    OrderedJson to_json() const;
    static RunConfig from_json(const Json& object);

    // Hex SHA-256 of the canonical JSON form.
    std::string hash() const;
};

}  // namespace kernelcur
