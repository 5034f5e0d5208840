#include <gtest/gtest.h>

#include "kernelcur/error.hpp"
#include "kernelcur/protocol.hpp"

using namespace kernelcur;
using namespace kernelcur::protocol;

TEST(Protocol, HelloFrameIsExact) {
    EXPECT_EQ(hello_frame(), R"({"type":"hello","protocol":1})");
}

TEST(Protocol, EvalFrameFieldOrder) {
    RunnerRequest req{request_id({"t", 3}), {"t", 3}, "ref", "ker", {}};
    EXPECT_EQ(req.id, "t#3");
    EXPECT_EQ(eval_frame(req),
              R"({"type":"eval","id":"t#3","task_source":"ref","kernel_source":"ker","config":{"warmup_iters":3,"timed_iters":10,"timing_agg":"median","n_input_seeds":5,"atol":0.01,"rtol":0.01,"timeout_s":300.0,"device":"gpu"}})");
}

TEST(Protocol, ResultFrameRoundTrip) {
    RunnerResponse r;
    r.id = "x#0";
    r.status = Status::runtime_error;
    r.diagnostics = "boom";
    const auto line = result_frame(r);
    EXPECT_EQ(line, R"({"type":"result","id":"x#0","status":"runtime_error","diagnostics":"boom"})");
    const auto back = parse_result_frame(line);
    EXPECT_EQ(back.id, "x#0");
    EXPECT_EQ(back.status, Status::runtime_error);
    EXPECT_FALSE(back.t_ref_ms.has_value());
}

TEST(Protocol, HelloReply) {
    EXPECT_EQ(parse_hello_reply(R"({"type":"hello","protocol":1,"capabilities":["gpu","cpu"]})"),
              (std::vector<std::string>{"gpu", "cpu"}));
    EXPECT_THROW(parse_hello_reply(R"({"type":"hello","protocol":2,"capabilities":[]})"),
                 HandshakeError);
    EXPECT_THROW(parse_hello_reply("garbage"), HandshakeError);
    EXPECT_THROW(parse_hello_reply(R"({"type":"result","protocol":1})"), HandshakeError);
}

TEST(Protocol, MalformedResults) {
    EXPECT_THROW(parse_result_frame("not json"), ProtocolError);
    EXPECT_THROW(parse_result_frame(R"({"type":"result","id":"a","status":"great","diagnostics":""})"),
                 ProtocolError);
    EXPECT_THROW(parse_result_frame(R"({"type":"hello","id":"a","status":"correct","diagnostics":""})"),
                 ProtocolError);
    EXPECT_THROW(parse_result_frame(R"({"type":"result","status":"correct","diagnostics":""})"),
                 ProtocolError);
    EXPECT_THROW(parse_result_frame(R"({"type":"result","id":"a","status":"correct","t_ref_ms":"1","diagnostics":""})"),
                 ProtocolError);
}
