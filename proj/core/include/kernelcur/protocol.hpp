#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kernelcur/records.hpp"
#include "kernelcur/run_config.hpp"

namespace kernelcur::protocol {

inline constexpr int kProtocolVersion = 1;

struct RunnerRequest {
    std::string id;
    RecordKey key;
    std::string task_source;
    std::string kernel_source;
    RunConfig config;
};

struct RunnerResponse {
    std::string id;
    Status status = Status::incorrect;
    std::optional<double> t_ref_ms;
    std::optional<double> t_kernel_ms;
    std::string diagnostics;
    // Verdict made up by the harness (timeout, crash) rather than reported by
    // a runner; such verdicts are never cached.
    bool synthetic = false;
};

std::string request_id(const RecordKey& key);

std::string hello_frame();
std::string eval_frame(const RunnerRequest& request);
std::string result_frame(const RunnerResponse& response);

// Validates a runner's handshake reply and returns its capabilities.
// Throws HandshakeError.
std::vector<std::string> parse_hello_reply(std::string_view line);

// Throws ProtocolError on anything but a well-formed result frame.
RunnerResponse parse_result_frame(std::string_view line);

}  // namespace kernelcur::protocol
