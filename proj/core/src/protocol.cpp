#include "kernelcur/protocol.hpp"

#include "kernelcur/error.hpp"

namespace kernelcur::protocol {

std::string request_id(const RecordKey& key) {
    return key.task_id + "#" + std::to_string(key.gen_index);
}

std::string hello_frame() {
    OrderedJson j;
    j["type"] = "hello";
    j["protocol"] = kProtocolVersion;
    return dump_line(j);
}

std::string eval_frame(const RunnerRequest& request) {
    OrderedJson j;
    j["type"] = "eval";
    j["id"] = request.id;
    j["task_source"] = request.task_source;
    j["kernel_source"] = request.kernel_source;
    j["config"] = request.config.to_json();
    return dump_line(j);
}

std::string result_frame(const RunnerResponse& response) {
    OrderedJson j;
    j["type"] = "result";
    j["id"] = response.id;
    j["status"] = std::string(to_string(response.status));
    if (response.t_ref_ms) j["t_ref_ms"] = *response.t_ref_ms;
    if (response.t_kernel_ms) j["t_kernel_ms"] = *response.t_kernel_ms;
    j["diagnostics"] = response.diagnostics;
    return dump_line(j);
}

std::vector<std::string> parse_hello_reply(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error&) {
        throw HandshakeError("handshake reply is not JSON: " + std::string(line));
    }
    if (!j.is_object() || j.value("type", "") != "hello") {
        throw HandshakeError("expected hello frame, got: " + std::string(line));
    }
    auto version = j.find("protocol");
    if (version == j.end() || !version->is_number_integer() ||
        version->get<int>() != kProtocolVersion) {
        throw HandshakeError("runner speaks an unsupported protocol version");
    }
    std::vector<std::string> caps;
    if (auto c = j.find("capabilities"); c != j.end()) {
        if (!c->is_array()) throw HandshakeError("capabilities must be an array");
        for (const auto& v : *c) {
            if (!v.is_string()) throw HandshakeError("capabilities must be strings");
            caps.push_back(v.get<std::string>());
        }
    }
    return caps;
}

namespace {

std::optional<double> optional_time(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ProtocolError(std::string(key) + " must be a number");
    return it->get<double>();
}

}  // namespace

RunnerResponse parse_result_frame(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error&) {
        throw ProtocolError("malformed frame: " + std::string(line));
    }
    if (!j.is_object() || j.value("type", "") != "result") {
        throw ProtocolError("expected result frame, got: " + std::string(line));
    }
    RunnerResponse r;
    auto id = j.find("id");
    if (id == j.end() || !id->is_string()) throw ProtocolError("result frame without string id");
    r.id = id->get<std::string>();
    auto status = j.find("status");
    if (status == j.end() || !status->is_string()) throw ProtocolError("result frame without status");
    auto parsed = parse_status(status->get<std::string>());
    if (!parsed) throw ProtocolError("unknown status \"" + status->get<std::string>() + "\"");
    r.status = *parsed;
    r.t_ref_ms = optional_time(j, "t_ref_ms");
    r.t_kernel_ms = optional_time(j, "t_kernel_ms");
    if (auto d = j.find("diagnostics"); d != j.end() && !d->is_null()) {
        if (!d->is_string()) throw ProtocolError("diagnostics must be a string");
        r.diagnostics = d->get<std::string>();
    }
    return r;
}

}  // namespace kernelcur::protocol
