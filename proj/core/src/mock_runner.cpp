#include "kernelcur/runner.hpp"

#include "kernelcur/digest.hpp"
#include "kernelcur/error.hpp"

namespace kernelcur {

ScriptedRunner::ScriptedRunner(std::map<RecordKey, RunnerResponse> fixture)
    : fixture_(std::move(fixture)) {}

RunnerResponse ScriptedRunner::evaluate(std::size_t, const RunnerRequest& request) {
    count_invocation();
    auto it = fixture_.find(request.key);
    if (it == fixture_.end()) {
        throw ProtocolError("scripted runner has no fixture for " + to_string(request.key));
    }
    RunnerResponse response = it->second;
    response.id = request.id;
    return response;
}

RunnerResponse HashedRunner::verdict_for(const std::string& kernel_source) {
    const Sha256 d = sha256(kernel_source);
    static constexpr Status kClasses[] = {Status::correct, Status::incorrect,
                                          Status::compile_error, Status::runtime_error};
    RunnerResponse r;
    r.status = kClasses[d[0] % 4];
    if (r.status == Status::correct) {
        const auto word = [&](std::size_t i) {
            return static_cast<double>((static_cast<unsigned>(d[i]) << 8) | d[i + 1]);
        };
        // Both in (0.05, 20.05] ms.
        r.t_ref_ms = 0.05 + (word(1) + 1.0) / 65536.0 * 20.0;
        r.t_kernel_ms = 0.05 + (word(3) + 1.0) / 65536.0 * 20.0;
    }
    r.diagnostics = "hashed mock verdict " + to_hex(d).substr(0, 8);
    return r;
}

RunnerResponse HashedRunner::evaluate(std::size_t, const RunnerRequest& request) {
    count_invocation();
    RunnerResponse r = verdict_for(request.kernel_source);
    r.id = request.id;
    return r;
}

std::unique_ptr<Runner> mock_runner(MockMode mode, std::map<RecordKey, RunnerResponse> fixture) {
    if (mode == MockMode::scripted) return std::make_unique<ScriptedRunner>(std::move(fixture));
    return std::make_unique<HashedRunner>();
}

std::map<RecordKey, RunnerResponse> load_scripted_fixture(const std::filesystem::path& path) {
    std::map<RecordKey, RunnerResponse> fixture;
    for_each_json_line(path, [&](Json&& j, std::size_t) {
        RecordKey key{field::string(j, "task_id"), field::integer(j, "gen_index")};
        RunnerResponse r;
        auto status = parse_status(field::string(j, "status"));
        if (!status) throw Error("unknown status in fixture");
        r.status = *status;
        if (j.contains("t_ref_ms") && !j["t_ref_ms"].is_null()) r.t_ref_ms = field::real(j, "t_ref_ms");
        if (j.contains("t_kernel_ms") && !j["t_kernel_ms"].is_null()) {
            r.t_kernel_ms = field::real(j, "t_kernel_ms");
        }
        if (j.contains("diagnostics")) r.diagnostics = field::string(j, "diagnostics");
        if (!fixture.emplace(key, std::move(r)).second) {
            throw Error("duplicate fixture entry " + to_string(key));
        }
    });
    return fixture;
}

}  // namespace kernelcur
