#include "kernelcur/run_config.hpp"

#include <cmath>

#include "kernelcur/digest.hpp"
#include "kernelcur/error.hpp"

namespace kernelcur {

std::string_view to_string(TimingAggregation agg) {
    return agg == TimingAggregation::median ? "median" : "mean";
}

std::string_view to_string(Device device) { return device == Device::gpu ? "gpu" : "cpu"; }

std::optional<TimingAggregation> parse_timing_aggregation(std::string_view text) {
    if (text == "median") return TimingAggregation::median;
    if (text == "mean") return TimingAggregation::mean;
    return std::nullopt;
}

std::optional<Device> parse_device(std::string_view text) {
    if (text == "gpu") return Device::gpu;
    if (text == "cpu") return Device::cpu;
    return std::nullopt;
}

void RunConfig::validate() const {
    if (warmup_iters < 0) throw DomainError("warmup_iters must be >= 0");
    if (timed_iters < 1) throw DomainError("timed_iters must be >= 1");
    if (n_input_seeds < 1) throw DomainError("n_input_seeds must be >= 1");
    if (!std::isfinite(atol) || atol < 0.0) throw DomainError("atol must be finite and >= 0");
    if (!std::isfinite(rtol) || rtol < 0.0) throw DomainError("rtol must be finite and >= 0");
    if (!(timeout_s > 0.0) || !std::isfinite(timeout_s)) throw DomainError("timeout_s must be > 0");
}

OrderedJson RunConfig::to_json() const {
    OrderedJson j;
    j["warmup_iters"] = warmup_iters;
    j["timed_iters"] = timed_iters;
    j["timing_agg"] = std::string(to_string(timing_agg));
    j["n_input_seeds"] = n_input_seeds;
    j["atol"] = atol;
    j["rtol"] = rtol;
    j["timeout_s"] = timeout_s;
    j["device"] = std::string(to_string(device));
    return j;
}

RunConfig RunConfig::from_json(const Json& j) {
    RunConfig c;
    c.warmup_iters = field::integer(j, "warmup_iters");
    c.timed_iters = field::integer(j, "timed_iters");
    auto agg = parse_timing_aggregation(field::string(j, "timing_agg"));
    if (!agg) throw Error("unknown timing_agg");
    c.timing_agg = *agg;
    c.n_input_seeds = field::integer(j, "n_input_seeds");
    c.atol = field::real(j, "atol");
    c.rtol = field::real(j, "rtol");
    c.timeout_s = field::real(j, "timeout_s");
    auto device = parse_device(field::string(j, "device"));
    if (!device) throw Error("unknown device");
    c.device = *device;
    c.validate();
    return c;
}

std::string RunConfig::hash() const { return to_hex(sha256(dump_line(to_json()))); }

}  // namespace kernelcur
