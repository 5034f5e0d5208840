#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>
#include <chrono>
#include <thread>

#include "kernelcur/error.hpp"
#include "kernelcur/runner.hpp"

namespace kernelcur {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kHandshakeTimeoutS = 30.0;
constexpr auto kGracefulExit = std::chrono::seconds(2);

enum class ReadOutcome { line, eof, timeout };

}  // namespace

struct ExternalRunner::Process {
    pid_t pid = -1;
    int fd = -1;
    std::string buffer;
    bool launched_once = false;
    bool exhausted = false;
    int restarts = 0;

    bool running() const { return pid > 0; }

    void spawn(const std::string& command) {
        int sv[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
            throw HandshakeError("socketpair failed: " + std::string(std::strerror(errno)));
        }
        const char* cmd = command.c_str();
        const pid_t child = ::fork();
        if (child < 0) {
            ::close(sv[0]);
            ::close(sv[1]);
            throw HandshakeError("fork failed: " + std::string(std::strerror(errno)));
        }
        if (child == 0) {
            ::setpgid(0, 0);
            ::dup2(sv[1], STDIN_FILENO);
            ::dup2(sv[1], STDOUT_FILENO);
            ::execl("/bin/sh", "sh", "-c", cmd, static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::setpgid(child, child);
        ::close(sv[1]);
        pid = child;
        fd = sv[0];
        buffer.clear();
    }

    bool send_line(const std::string& frame) {
        std::string data = frame + "\n";
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

    ReadOutcome read_line(double timeout_s, std::string& line) {
        const auto deadline =
            Clock::now() + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(timeout_s));
        for (;;) {
            if (auto nl = buffer.find('\n'); nl != std::string::npos) {
                line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return ReadOutcome::line;
            }
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            if (remaining.count() <= 0) return ReadOutcome::timeout;
            pollfd pfd{fd, POLLIN, 0};
            const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(
                                                  remaining.count(), 1 << 30)));
            if (ready < 0) {
                if (errno == EINTR) continue;
                return ReadOutcome::eof;
            }
            if (ready == 0) return ReadOutcome::timeout;
            char chunk[65536];
            const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
            if (n < 0) {
                if (errno == EINTR) continue;
                return ReadOutcome::eof;
            }
            if (n == 0) return ReadOutcome::eof;
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void kill_now() {
        if (pid > 0) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
        }
        reset();
    }

    void stop_gracefully() {
        if (pid <= 0) return;
        ::shutdown(fd, SHUT_WR);
        const auto until = Clock::now() + kGracefulExit;
        while (Clock::now() < until) {
            if (::waitpid(pid, nullptr, WNOHANG) == pid) {
                ::kill(-pid, SIGKILL);
                reset();
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        kill_now();
    }

    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
        pid = -1;
        buffer.clear();
    }
};

ExternalRunner::ExternalRunner(std::string command, ExternalRunnerOptions options)
    : command_(std::move(command)), options_(options) {}

ExternalRunner::~ExternalRunner() { close(); }

void ExternalRunner::log(std::string line) {
    if (!options_.record_transcript) return;
    std::lock_guard lock(log_mutex_);
    transcript_.push_back(std::move(line));
}

std::vector<std::string> ExternalRunner::transcript() const {
    std::lock_guard lock(log_mutex_);
    return transcript_;
}

std::vector<std::string> ExternalRunner::capabilities() const {
    std::lock_guard lock(log_mutex_);
    return capabilities_;
}

int ExternalRunner::restarts() const {
    int total = 0;
    for (const auto& p : lanes_) total += p->restarts;
    return total;
}

namespace {

void launch(ExternalRunner::Process& p, const std::string& command,
            const std::function<void(std::string)>& log, std::vector<std::string>& caps_out,
            std::mutex& caps_mutex) {
    log("! spawn");
    p.spawn(command);
    const std::string hello = protocol::hello_frame();
    log("> " + hello);
    std::string reply;
    const bool sent = p.send_line(hello);
    const ReadOutcome outcome = sent ? p.read_line(kHandshakeTimeoutS, reply) : ReadOutcome::eof;
    if (outcome != ReadOutcome::line) {
        p.kill_now();
        throw HandshakeError(outcome == ReadOutcome::timeout
                                 ? "runner did not answer the handshake"
                                 : "runner exited during the handshake");
    }
    log("< " + reply);
    try {
        auto caps = protocol::parse_hello_reply(reply);
        std::lock_guard lock(caps_mutex);
        caps_out = std::move(caps);
    } catch (...) {
        p.kill_now();
        throw;
    }
    p.launched_once = true;
}

RunnerResponse synthetic(const RunnerRequest& request, Status status, std::string diagnostics) {
    RunnerResponse r;
    r.id = request.id;
    r.status = status;
    r.diagnostics = std::move(diagnostics);
    r.synthetic = true;
    return r;
}

}  // namespace

void ExternalRunner::open(std::size_t lanes) {
    if (lanes == 0) lanes = 1;
    while (lanes_.size() < lanes) lanes_.push_back(std::make_unique<Process>());
    for (auto& p : lanes_) {
        if (!p->launched_once) {
            launch(*p, command_, [this](std::string l) { log(std::move(l)); }, capabilities_,
                   log_mutex_);
        }
    }
}

RunnerResponse ExternalRunner::evaluate(std::size_t lane, const RunnerRequest& request) {
    count_invocation();
    if (lane >= lanes_.size()) {
        throw Error("external runner lane " + std::to_string(lane) + " was not opened");
    }
    Process& p = *lanes_[lane];
    auto logger = [this](std::string l) { log(std::move(l)); };

    for (;;) {
        if (p.exhausted) {
            return synthetic(request, Status::runtime_error,
                             "runner crashed; retry budget of " +
                                 std::to_string(options_.retry_budget) + " restarts exhausted");
        }
        if (!p.running()) {
            const bool first = !p.launched_once;
            try {
                launch(p, command_, logger, capabilities_, log_mutex_);
            } catch (const HandshakeError&) {
                if (first) throw;
                log("! crash");
                if (p.restarts >= options_.retry_budget) {
                    p.exhausted = true;
                    continue;
                }
                ++p.restarts;
                log("! restart " + std::to_string(p.restarts));
                continue;
            }
        }

        const std::string frame = protocol::eval_frame(request);
        log("> " + frame);
        std::string line;
        const ReadOutcome outcome =
            p.send_line(frame) ? p.read_line(request.config.timeout_s, line) : ReadOutcome::eof;

        if (outcome == ReadOutcome::timeout) {
            log("! timeout " + request.id);
            p.kill_now();
            return synthetic(request, Status::timeout,
                             "no response within " + std::to_string(request.config.timeout_s) +
                                 " s; runner killed");
        }
        if (outcome == ReadOutcome::eof) {
            log("! crash");
            p.kill_now();
            if (p.restarts >= options_.retry_budget) {
                p.exhausted = true;
                continue;
            }
            ++p.restarts;
            log("! restart " + std::to_string(p.restarts));
            continue;
        }

        log("< " + line);
        RunnerResponse response = protocol::parse_result_frame(line);
        if (response.id != request.id) {
            throw ProtocolError("runner answered id \"" + response.id + "\" to request \"" +
                                request.id + "\"");
        }
        return response;
    }
}

void ExternalRunner::close() {
    for (auto& p : lanes_) {
        if (p->running()) {
            p->stop_gracefully();
            log("! exit");
        }
    }
}

std::unique_ptr<Runner> spawn_external_runner(const std::string& command,
                                              ExternalRunnerOptions options) {
    auto runner = std::make_unique<ExternalRunner>(command, options);
    runner->open(1);
    return runner;
}

}  // namespace kernelcur
