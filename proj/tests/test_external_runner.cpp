#include <chrono>

#include <gtest/gtest.h>

#include "kernelcur/error.hpp"
#include "kernelcur/harness.hpp"
#include "kernelcur/runner.hpp"
#include "support/tmpdir.hpp"

using namespace kernelcur;

namespace {

std::string stub(const std::string& args = "") {
    return std::string("'") + KERNELCUR_STUB_RUNNER + "' " + args;
}

std::vector<GenerationRecord> crash_records(int n) {
    std::vector<GenerationRecord> out;
    for (int i = 0; i < n; ++i) {
        GenerationRecord r;
        r.task_id = "crash";
        r.gen_index = i;
        r.task_source = "ref";
        r.kernel_source = "k" + std::to_string(i);
        out.push_back(r);
    }
    return out;
}

RunConfig cpu_config(double timeout_s) {
    RunConfig cfg;
    cfg.device = Device::cpu;
    cfg.timeout_s = timeout_s;
    return cfg;
}

std::vector<std::string> golden_lines() {
    const auto text =
        testing_support::read_text(std::string(KERNELCUR_GOLDEN_DIR) + "/crash_recovery.transcript");
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace

TEST(ExternalRunner, EchoStubGivesUnitSpeedups) {
    ExternalRunnerOptions opts;
    auto runner = spawn_external_runner(stub(), opts);
    const auto out = harness::evaluate(crash_records(6), *runner, cpu_config(10), {3});
    runner->close();
    for (const auto& e : out.results) {
        EXPECT_EQ(e.status, Status::correct);
        EXPECT_EQ(e.speedup, 1.0);
    }
    EXPECT_EQ(dynamic_cast<ExternalRunner&>(*runner).capabilities(),
              std::vector<std::string>{"cpu"});
}

TEST(ExternalRunner, CrashRecoveryMatchesGoldenTranscript) {
    ExternalRunnerOptions opts;
    opts.retry_budget = 2;
    opts.record_transcript = true;
    auto runner = spawn_external_runner(stub("--die-after 2"), opts);
    const auto out = harness::evaluate(crash_records(5), *runner, cpu_config(30), {1});
    runner->close();
    for (const auto& e : out.results) EXPECT_EQ(e.status, Status::correct) << e.task_id << e.gen_index;
    auto& ext = dynamic_cast<ExternalRunner&>(*runner);
    EXPECT_EQ(ext.restarts(), 2);
    EXPECT_EQ(ext.transcript(), golden_lines());
}

TEST(ExternalRunner, ExhaustedBudgetGivesRuntimeError) {
    ExternalRunnerOptions opts;
    opts.retry_budget = 1;
    auto runner = spawn_external_runner(stub("--die-after 2"), opts);
    const auto out = harness::evaluate(crash_records(6), *runner, cpu_config(30), {1});
    runner->close();
    // Two from the first process, two after the single restart, then the lane is spent.
    for (int i = 0; i < 4; ++i) EXPECT_EQ(out.results[i].status, Status::correct);
    for (int i = 4; i < 6; ++i) {
        EXPECT_EQ(out.results[i].status, Status::runtime_error);
        EXPECT_NE(out.results[i].diagnostics.find("retry budget"), std::string::npos);
    }
}

TEST(ExternalRunner, SilentStubTimesOut) {
    auto runner = spawn_external_runner(stub("--mode silent"));
    const auto started = std::chrono::steady_clock::now();
    const auto out = harness::evaluate(crash_records(1), *runner, cpu_config(1), {1});
    const auto elapsed = std::chrono::steady_clock::now() - started;
    runner->close();
    EXPECT_EQ(out.results[0].status, Status::timeout);
    EXPECT_EQ(out.results[0].speedup, 0.0);
    EXPECT_LT(elapsed, std::chrono::seconds(5));
}

TEST(ExternalRunner, TimeoutResultIsNotCached) {
    testing_support::TempDir dir;
    ResultCache cache(dir / "c");
    auto runner = spawn_external_runner(stub("--mode silent"));
    harness::evaluate(crash_records(1), *runner, cpu_config(0.3), {1, &cache});
    runner->close();
    EXPECT_EQ(cache.index_size(), 0u);
}

TEST(ExternalRunner, BadHandshakeThrows) {
    EXPECT_THROW(spawn_external_runner(stub("--mode bad-handshake")), HandshakeError);
    EXPECT_THROW(spawn_external_runner("exit 3"), HandshakeError);
}

TEST(ExternalRunner, WrongIdAbortsBatch) {
    auto runner = spawn_external_runner(stub("--mode wrong-id"));
    EXPECT_THROW(harness::evaluate(crash_records(3), *runner, cpu_config(10), {1}),
                 harness::BatchAborted);
    runner->close();
}

TEST(ExternalRunner, GarbageFrameAbortsBatch) {
    auto runner = spawn_external_runner(stub("--mode garbage"));
    try {
        harness::evaluate(crash_records(2), *runner, cpu_config(10), {1});
        FAIL();
    } catch (const harness::BatchAborted& e) {
        EXPECT_EQ(e.n_completed(), 0u);
        EXPECT_NE(std::string(e.what()).find("malformed"), std::string::npos);
    }
    runner->close();
}

TEST(ExternalRunner, OneProcessPerLane) {
    testing_support::TempDir dir;
    const auto counter = (dir / "spawns").string();
    auto runner = spawn_external_runner(stub("--counter '" + counter + "'"));
    harness::evaluate(crash_records(12), *runner, cpu_config(10), {4});
    runner->close();
    EXPECT_EQ(testing_support::read_text(counter).size(), 4u);
}
