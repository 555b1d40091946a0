#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "agto/errors.hpp"
#include "agto/evaluator_client.hpp"

using namespace agto;
using namespace agto::hpo;
using namespace std::chrono_literals;

namespace {

std::string fake(const std::string& args) {
  return std::string("'") + FAKE_EVALUATOR + "' " + args;
}

const TrialParams kTrial{55, 0.1, 600, 50, "tanh"};
const TrialParams kOther{10, 0.01, 200, 2, "relu"};

} // namespace

TEST(Wire, EncodeRequest) {
  const auto j = nlohmann::json::parse(encode_request(7, {32, 0.25, 256, 10, "elu"}));
  EXPECT_EQ(j["trial_id"], 7);
  EXPECT_EQ(j["neurons"], 32);
  EXPECT_EQ(j["learning_rate"], 0.25);
  EXPECT_EQ(j["batch_size"], 256);
  EXPECT_EQ(j["epochs"], 10);
  EXPECT_EQ(j["activation"], "elu");
  EXPECT_EQ(encode_request(1, kTrial).find('\n'), std::string::npos);
}

TEST(Wire, ParseReply) {
  auto r = parse_reply(R"({"trial_id": 3, "fitness": 0.75})", 3);
  EXPECT_EQ(r.status, EvalOutcome::Status::Ok);
  EXPECT_EQ(r.fitness, 0.75);
  r = parse_reply(R"({"trial_id": 3, "error": "diverged"})", 3);
  EXPECT_EQ(r.status, EvalOutcome::Status::Rejected);
  EXPECT_EQ(r.error, "diverged");
  EXPECT_THROW(parse_reply(R"({"trial_id": 4, "fitness": 1})", 3), ProtocolError);
  EXPECT_THROW(parse_reply("nonsense", 3), ProtocolError);
  EXPECT_THROW(parse_reply(R"({"fitness": 1})", 3), ProtocolError);
  EXPECT_THROW(parse_reply(R"({"trial_id": 3})", 3), ProtocolError);
  EXPECT_THROW(parse_reply(R"({"trial_id": 3, "fitness": "low"})", 3), ProtocolError);
  EXPECT_THROW(parse_reply("[1, 2]", 3), ProtocolError);
}

TEST(Wire, Handshake) {
  EXPECT_NO_THROW(check_handshake(R"({"protocol": 1})"));
  EXPECT_THROW(check_handshake(R"({"protocol": 2})"), ProtocolError);
  EXPECT_THROW(check_handshake(R"({"hello": 1})"), ProtocolError);
  EXPECT_THROW(check_handshake("ready"), ProtocolError);
}

TEST(Subprocess, SurrogateRoundTrip) {
  SubprocessEvaluator ev(fake("surrogate"), 10s);
  EXPECT_TRUE(ev.running());
  auto r = ev.evaluate(1, kTrial);
  ASSERT_EQ(r.status, EvalOutcome::Status::Ok) << r.error;
  EXPECT_EQ(r.fitness, 0.0);
  r = ev.evaluate(2, kOther);
  ASSERT_EQ(r.status, EvalOutcome::Status::Ok);
  EXPECT_EQ(r.fitness, surrogate_objective(kOther));
  EXPECT_EQ(ev.launches(), 1u);
}

TEST(Subprocess, ErrorReplyIsRejection) {
  SubprocessEvaluator ev(fake("error"), 10s);
  const auto r = ev.evaluate(1, kTrial);
  EXPECT_EQ(r.status, EvalOutcome::Status::Rejected);
  EXPECT_EQ(r.error, "training diverged");
  EXPECT_TRUE(ev.running());
}

TEST(Subprocess, MalformedReplyIsTransportFailure) {
  SubprocessEvaluator ev(fake("malformed"), 10s);
  const auto r = ev.evaluate(1, kTrial);
  EXPECT_EQ(r.status, EvalOutcome::Status::Transport);
  EXPECT_FALSE(ev.running());
  // next request relaunches
  EXPECT_EQ(ev.evaluate(2, kTrial).status, EvalOutcome::Status::Transport);
  EXPECT_EQ(ev.launches(), 2u);
}

TEST(Subprocess, WrongTrialId) {
  SubprocessEvaluator ev(fake("wrong-id"), 10s);
  EXPECT_EQ(ev.evaluate(5, kTrial).status, EvalOutcome::Status::Transport);
}

TEST(Subprocess, CrashThenRelaunch) {
  SubprocessEvaluator ev(fake("crash-after 1"), 10s);
  EXPECT_EQ(ev.evaluate(1, kTrial).status, EvalOutcome::Status::Ok);
  const auto r = ev.evaluate(2, kTrial);
  EXPECT_EQ(r.status, EvalOutcome::Status::Transport);
  EXPECT_FALSE(ev.running());
  EXPECT_EQ(ev.evaluate(3, kTrial).status, EvalOutcome::Status::Ok);
  EXPECT_EQ(ev.launches(), 2u);
}

TEST(Subprocess, Timeout) {
  SubprocessEvaluator ev(fake("slow 3000"), 200ms);
  const auto start = std::chrono::steady_clock::now();
  const auto r = ev.evaluate(1, kTrial);
  EXPECT_EQ(r.status, EvalOutcome::Status::Transport);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 2s);
  EXPECT_FALSE(ev.running());
}

TEST(Subprocess, BadHandshake) {
  EXPECT_THROW(SubprocessEvaluator(fake("bad-handshake"), 5s), ProtocolError);
  EXPECT_THROW(SubprocessEvaluator(fake("no-handshake"), 5s), ProtocolError);
  EXPECT_THROW(SubprocessEvaluator("exit 0", 5s), ProtocolError);
}

TEST(Subprocess, RunHpoRetriesAfterCrash) {
  const auto marker = std::filesystem::temp_directory_path() / ("agto_crash_once_" + std::to_string(::getpid()));
  std::filesystem::remove(marker);
  SubprocessEvaluator ev(fake("crash-once '" + marker.string() + "'"), 10s);
  OptimizerConfig cfg;
  cfg.max_evals = 120;
  const auto r = run_hpo({}, ev, cfg);
  std::filesystem::remove(marker);
  EXPECT_EQ(ev.launches(), 2u);
  EXPECT_EQ(r.evaluator_calls, r.history.size() + 1);
  for (const auto& t : r.history) {
    EXPECT_FALSE(t.failed);
    EXPECT_EQ(t.fitness, surrogate_objective(t.params));
  }
}

TEST(Subprocess, PersistentCrashMarksTrialFailed) {
  SubprocessEvaluator ev(fake("crash-after 0"), 10s);
  OptimizerConfig cfg;
  cfg.max_evals = 120;
  EXPECT_THROW(run_hpo({}, ev, cfg), HpoAborted);
}
