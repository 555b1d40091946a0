#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <sys/types.h>

#include "agto/hpo.hpp"

namespace agto::hpo {

inline constexpr int kProtocolVersion = 1;

// Wire format: one JSON object per line in each direction.
//   handshake  <- {"protocol": 1}
//   request    -> {"trial_id": n, "neurons": .., "learning_rate": .., "batch_size": ..,
//                  "epochs": .., "activation": ".."}
//   reply      <- {"trial_id": n, "fitness": x} | {"trial_id": n, "error": "..."}
std::string encode_request(std::uint64_t trial_id, const TrialParams& params);

// Throws ProtocolError when the line is not a valid reply for `expected_id`.
EvalOutcome parse_reply(const std::string& line, std::uint64_t expected_id);

// Throws ProtocolError unless the line announces a supported version.
void check_handshake(const std::string& line);

// Runs the evaluator command through /bin/sh and owns the process. A
// transport failure kills the child; the next request relaunches it.
class SubprocessEvaluator final : public EvaluatorClient {
public:
  explicit SubprocessEvaluator(std::string command,
                               std::chrono::duration<double> timeout = std::chrono::seconds(300));
  ~SubprocessEvaluator() override;

  SubprocessEvaluator(const SubprocessEvaluator&) = delete;
  SubprocessEvaluator& operator=(const SubprocessEvaluator&) = delete;

  EvalOutcome evaluate(std::uint64_t trial_id, const TrialParams& params) override;

  std::size_t launches() const { return launches_; }
  bool running() const { return pid_ > 0; }

private:
  // Throws ProtocolError on handshake failure.
  void launch();
  void terminate();
  bool send_line(const std::string& line);
  std::optional<std::string> read_line();

  std::string command_;
  std::chrono::duration<double> timeout_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::size_t launches_ = 0;
};

} // namespace agto::hpo
