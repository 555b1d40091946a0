#include "agto/evaluator_client.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace agto::hpo {

using json = nlohmann::json;

std::string encode_request(std::uint64_t trial_id, const TrialParams& params) {
  json j;
  j["trial_id"] = trial_id;
  j["neurons"] = params.neurons;
  j["learning_rate"] = params.learning_rate;
  j["batch_size"] = params.batch_size;
  j["epochs"] = params.epochs;
  j["activation"] = params.activation;
  return j.dump();
}

EvalOutcome parse_reply(const std::string& line, std::uint64_t expected_id) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed reply: ") + e.what());
  }
  if (!j.is_object() || !j.contains("trial_id") || !j["trial_id"].is_number_integer())
    throw ProtocolError("reply lacks an integer trial_id: " + line);
  if (j["trial_id"].get<std::uint64_t>() != expected_id)
    throw ProtocolError("reply for trial " + j["trial_id"].dump() + " while waiting for " +
                        std::to_string(expected_id));
  if (j.contains("error"))
    return EvalOutcome::rejected(j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump());
  if (!j.contains("fitness") || !j["fitness"].is_number())
    throw ProtocolError("reply lacks a numeric fitness: " + line);
  const double f = j["fitness"].get<double>();
  if (!std::isfinite(f))
    throw ProtocolError("non-finite fitness in reply: " + line);
  return EvalOutcome::ok(f);
}

void check_handshake(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw ProtocolError("malformed handshake: " + line);
  }
  if (!j.is_object() || !j.contains("protocol") || j["protocol"] != kProtocolVersion)
    throw ProtocolError("unsupported handshake: " + line);
}

SubprocessEvaluator::SubprocessEvaluator(std::string command, std::chrono::duration<double> timeout)
    : command_(std::move(command)), timeout_(timeout) {
  launch();
}

SubprocessEvaluator::~SubprocessEvaluator() { terminate(); }

void SubprocessEvaluator::launch() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
    throw ProtocolError(std::string("socketpair failed: ") + std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw ProtocolError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  pid_ = pid;
  fd_ = fds[0];
  buffer_.clear();
  ++launches_;

  const auto line = read_line();
  if (!line) {
    terminate();
    throw ProtocolError("evaluator '" + command_ + "' sent no handshake");
  }
  try {
    check_handshake(*line);
  } catch (...) {
    terminate();
    throw;
  }
}

void SubprocessEvaluator::terminate() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    // Closing the socket gives a well-behaved evaluator EOF; give it a moment.
    int status = 0;
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      ::usleep(5000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

bool SubprocessEvaluator::send_line(const std::string& line) {
  const std::string data = line + "\n";
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<std::string> SubprocessEvaluator::read_line() {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(timeout_);
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.empty())
        continue;
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0)
      return std::nullopt;
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (ready < 0 && errno == EINTR)
      continue;
    if (ready <= 0)
      return std::nullopt;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR)
      continue;
    if (n <= 0)
      return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

EvalOutcome SubprocessEvaluator::evaluate(std::uint64_t trial_id, const TrialParams& params) {
  if (pid_ <= 0) {
    try {
      launch();
    } catch (const ProtocolError& e) {
      return EvalOutcome::transport(e.what());
    }
  }
  if (!send_line(encode_request(trial_id, params))) {
    terminate();
    return EvalOutcome::transport("evaluator closed its input");
  }
  const auto line = read_line();
  if (!line) {
    terminate();
    return EvalOutcome::transport("no reply for trial " + std::to_string(trial_id) +
                                  " (evaluator exited or timed out)");
  }
  try {
    return parse_reply(*line, trial_id);
  } catch (const ProtocolError& e) {
    terminate();
    return EvalOutcome::transport(e.what());
  }
}

} // namespace agto::hpo
