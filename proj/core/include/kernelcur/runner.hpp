#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "kernelcur/protocol.hpp"

namespace kernelcur {

using protocol::RunnerRequest;
using protocol::RunnerResponse;

// Something that turns a (reference, candidate) pair into a verdict.
//
// open(n) prepares n independent lanes; evaluate() may then run concurrently
// as long as each concurrent caller uses its own lane index.
class Runner {
public:
    virtual ~Runner() = default;

    virtual void open(std::size_t lanes) { (void)lanes; }
    virtual RunnerResponse evaluate(std::size_t lane, const RunnerRequest& request) = 0;
    virtual void close() {}

    // Number of requests actually handed to the runner.
    std::uint64_t invocations() const { return invocations_.load(); }

protected:
    void count_invocation() { invocations_.fetch_add(1); }

private:
    std::atomic<std::uint64_t> invocations_{0};
};

// Returns fixture verdicts keyed by (task_id, gen_index). A request with no
// fixture entry raises ProtocolError.
class ScriptedRunner final : public Runner {
public:
    explicit ScriptedRunner(std::map<RecordKey, RunnerResponse> fixture);

    RunnerResponse evaluate(std::size_t lane, const RunnerRequest& request) override;

private:
    std::map<RecordKey, RunnerResponse> fixture_;
};

// Derives a verdict from SHA-256(kernel_source): first byte mod 4 picks
// correct / incorrect / compile_error / runtime_error, later bytes give
// strictly positive timings.
class HashedRunner final : public Runner {
public:
    RunnerResponse evaluate(std::size_t lane, const RunnerRequest& request) override;

    static RunnerResponse verdict_for(const std::string& kernel_source);
};

enum class MockMode { scripted, hashed };

std::unique_ptr<Runner> mock_runner(MockMode mode,
                                    std::map<RecordKey, RunnerResponse> fixture = {});

// Fixture lines: {"task_id","gen_index","status","t_ref_ms"?,"t_kernel_ms"?,"diagnostics"?}
std::map<RecordKey, RunnerResponse> load_scripted_fixture(const std::filesystem::path& path);

struct ExternalRunnerOptions {
    int retry_budget = 2;
    bool record_transcript = false;
};

// Drives one child process per lane over newline-delimited JSON on its
// stdin/stdout. Crashes restart the lane's process and re-issue the request
// until the lane's retry budget is spent; timeouts kill the process and
// report status timeout.
class ExternalRunner final : public Runner {
public:
    ExternalRunner(std::string command, ExternalRunnerOptions options = {});
    ~ExternalRunner() override;

    ExternalRunner(const ExternalRunner&) = delete;
    ExternalRunner& operator=(const ExternalRunner&) = delete;

    void open(std::size_t lanes) override;
    RunnerResponse evaluate(std::size_t lane, const RunnerRequest& request) override;
    void close() override;

    // Events in order: "> frame" sent, "< frame" received, "! event".
    std::vector<std::string> transcript() const;
    std::vector<std::string> capabilities() const;
    int restarts() const;

    struct Process;

private:
    void log(std::string line);

    std::string command_;
    ExternalRunnerOptions options_;
    std::vector<std::unique_ptr<Process>> lanes_;
    mutable std::mutex log_mutex_;
    std::vector<std::string> transcript_;
    std::vector<std::string> capabilities_;
};

std::unique_ptr<Runner> spawn_external_runner(const std::string& command,
                                              ExternalRunnerOptions options = {});

}  // namespace kernelcur
