#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agto/errors.hpp"
#include "agto/gto.hpp"
#include "agto/search_space.hpp"

namespace agto::hpo {

inline constexpr std::array<std::string_view, 10> kActivations{
    "relu", "sigmoid", "softplus", "softsign", "tanh",
    "selu", "elu",     "exponential", "leakyrelu", "prelu"};

struct IntRange {
  int lo;
  int hi;
};

struct RealRange {
  double lo;
  double hi;
};

struct HyperparameterSpace {
  IntRange neurons{10, 100};
  RealRange learning_rate{0.01, 1.0};
  IntRange batch_size{200, 1000};
  IntRange epochs{2, 100};
  IntRange activation{0, 9};
};

struct TrialParams {
  int neurons = 0;
  double learning_rate = 0.0;
  int batch_size = 0;
  int epochs = 0;
  std::string activation;

  auto operator<=>(const TrialParams&) const = default;
};

struct TrialRecord {
  std::uint64_t trial_id = 0;
  TrialParams params;
  double fitness = 0.0; // +inf for failed trials
  double wall_time = 0.0;
  bool failed = false;
  std::string error;
};

// Index of an activation name in kActivations. Throws LookupError.
std::size_t activation_index(std::string_view name);

// Five continuous genes -> one trial. Integer genes round half away from zero
// and clamp; the activation gene floors into [0, 9]. Throws DimensionError.
TrialParams decode(std::span<const double> position, const HyperparameterSpace& space = {});

// The activation gene spans [0, 10] so every category owns a unit interval.
SearchSpace as_search_space(const HyperparameterSpace& space = {});

// Analytic stand-in for a training loss. Unique global minimum 0 at
// (55, 0.1, 600, 50, tanh):
//   un^2 + ul^2 + ub^2 + ue^2 + activation penalty
// with un = (neurons - 55) / 90, ul = log10(lr / 0.1) / 2,
// ub = (batch - 600) / 800, ue = (epochs - 50) / 98; each offset
// is scaled by its range width. The penalty table is not monotone in the
// gene order, so the activation gene has several local minima.
double surrogate_objective(const TrialParams& params);
double surrogate_activation_penalty(std::string_view activation);

// --- evaluator side --------------------------------------------------------

struct EvalOutcome {
  enum class Status {
    Ok,
    Rejected,  // evaluator replied with an error; not retried
    Transport, // crash, malformed reply or timeout; retried once
  };
  Status status = Status::Ok;
  double fitness = 0.0;
  std::string error;

  static EvalOutcome ok(double f) { return {Status::Ok, f, {}}; }
  static EvalOutcome rejected(std::string e) { return {Status::Rejected, 0.0, std::move(e)}; }
  static EvalOutcome transport(std::string e) { return {Status::Transport, 0.0, std::move(e)}; }
};

class EvaluatorClient {
public:
  virtual ~EvaluatorClient() = default;
  virtual EvalOutcome evaluate(std::uint64_t trial_id, const TrialParams& params) = 0;
};

class SurrogateEvaluator final : public EvaluatorClient {
public:
  EvalOutcome evaluate(std::uint64_t, const TrialParams& params) override {
    ++calls_;
    return EvalOutcome::ok(surrogate_objective(params));
  }
  std::size_t calls() const { return calls_; }

private:
  std::size_t calls_ = 0;
};

struct HpoOptions {
  std::size_t failure_window = 20;
  double failure_fraction = 0.5;
};

struct HpoResult {
  TrialRecord best;
  std::vector<TrialRecord> history; // ordered by trial_id
  RunResult run;
  std::size_t evaluator_calls = 0; // including retries
};

// Thrown when too many trials in a window fail.
struct HpoAborted : Error {
  using Error::Error;
};

// Minimizes evaluator fitness over the decoded space. Fitness is cached per
// distinct TrialParams, so duplicates never reach the evaluator. Failed
// trials are recorded with +inf and reported to the optimizer as the largest
// finite double.
HpoResult run_hpo(const HyperparameterSpace& space, EvaluatorClient& evaluator,
                  const OptimizerConfig& cfg, const HpoOptions& options = {});

// Best of `samples` uniform draws from the box, decoded and scored with the
// surrogate. Baseline for comparisons.
double random_search_surrogate(const HyperparameterSpace& space, std::size_t samples,
                               std::uint64_t seed);

} // namespace agto::hpo
