// Protocol-speaking stand-in evaluator for tests.
//
//   fake_evaluator surrogate         surrogate fitness for every request
//   fake_evaluator constant <v>      always <v>
//   fake_evaluator error             error reply for every request
//   fake_evaluator malformed         garbage line instead of a reply
//   fake_evaluator wrong-id          echoes trial_id + 1
//   fake_evaluator crash-after <k>   exits after answering k requests
//   fake_evaluator crash-once <file> exits on the first request if <file> is absent (creates it)
//   fake_evaluator slow <ms>         sleeps before each reply
//   fake_evaluator bad-handshake     announces protocol 2
//   fake_evaluator no-handshake      exits immediately

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

#include "agto/hpo.hpp"

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "surrogate";
  const std::string arg = argc > 2 ? argv[2] : "";

  if (mode == "no-handshake")
    return 0;
  std::cout << (mode == "bad-handshake" ? R"({"protocol": 2})" : R"({"protocol": 1})") << std::endl;

  std::string line;
  long answered = 0;
  while (std::getline(std::cin, line)) {
    const auto req = nlohmann::json::parse(line);
    const auto id = req.at("trial_id").get<std::uint64_t>();

    if (mode == "crash-after" && answered >= std::stol(arg))
      return 3;
    if (mode == "crash-once" && !std::filesystem::exists(arg)) {
      std::ofstream(arg) << "crashed\n";
      return 3;
    }
    if (mode == "slow")
      std::this_thread::sleep_for(std::chrono::milliseconds(std::stol(arg)));

    nlohmann::json reply{{"trial_id", mode == "wrong-id" ? id + 1 : id}};
    if (mode == "malformed") {
      std::cout << "this is not json" << std::endl;
      ++answered;
      continue;
    }
    if (mode == "error") {
      reply["error"] = "training diverged";
    } else if (mode == "constant") {
      reply["fitness"] = std::stod(arg);
    } else {
      agto::hpo::TrialParams p;
      p.neurons = req.at("neurons").get<int>();
      p.learning_rate = req.at("learning_rate").get<double>();
      p.batch_size = req.at("batch_size").get<int>();
      p.epochs = req.at("epochs").get<int>();
      p.activation = req.at("activation").get<std::string>();
      reply["fitness"] = agto::hpo::surrogate_objective(p);
    }
    std::cout << reply.dump() << std::endl;
    ++answered;
  }
  return 0;
}
