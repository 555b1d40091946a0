#include "agto/hpo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace agto::hpo {

namespace {

int decode_int(double gene, IntRange range) {
  const double r = std::round(gene); // half away from zero
  return static_cast<int>(std::clamp(r, static_cast<double>(range.lo), static_cast<double>(range.hi)));
}

constexpr std::array<double, kActivations.size()> kActivationPenalty{
    0.08, 0.25, 0.12, 0.18, 0.0, 0.05, 0.06, 0.4, 0.07, 0.09};

} // namespace

std::size_t activation_index(std::string_view name) {
  for (std::size_t i = 0; i < kActivations.size(); ++i)
    if (kActivations[i] == name)
      return i;
  throw LookupError("unknown activation '" + std::string(name) + "'");
}

TrialParams decode(std::span<const double> position, const HyperparameterSpace& space) {
  if (position.size() != 5)
    throw DimensionError("hyperparameter vector needs 5 genes, got " + std::to_string(position.size()));
  TrialParams t;
  t.neurons = decode_int(position[0], space.neurons);
  t.learning_rate = position[1];
  t.batch_size = decode_int(position[2], space.batch_size);
  t.epochs = decode_int(position[3], space.epochs);
  const double idx = std::clamp(std::floor(position[4]), static_cast<double>(space.activation.lo),
                                static_cast<double>(space.activation.hi));
  t.activation = std::string(kActivations[static_cast<std::size_t>(idx)]);
  return t;
}

SearchSpace as_search_space(const HyperparameterSpace& space) {
  return SearchSpace(
      {static_cast<double>(space.neurons.lo), space.learning_rate.lo,
       static_cast<double>(space.batch_size.lo), static_cast<double>(space.epochs.lo),
       static_cast<double>(space.activation.lo)},
      {static_cast<double>(space.neurons.hi), space.learning_rate.hi,
       static_cast<double>(space.batch_size.hi), static_cast<double>(space.epochs.hi),
       static_cast<double>(space.activation.hi + 1)});
}

double surrogate_activation_penalty(std::string_view activation) {
  return kActivationPenalty[activation_index(activation)];
}

double surrogate_objective(const TrialParams& p) {
  const double un = (p.neurons - 55) / 90.0;
  const double ul = std::log10(p.learning_rate / 0.1) / 2.0;
  const double ub = (p.batch_size - 600) / 800.0;
  const double ue = (p.epochs - 50) / 98.0;
  return un * un + ul * ul + ub * ub + ue * ue + surrogate_activation_penalty(p.activation);
}

HpoResult run_hpo(const HyperparameterSpace& space, EvaluatorClient& evaluator,
                  const OptimizerConfig& cfg, const HpoOptions& options) {
  using Clock = std::chrono::steady_clock;
  constexpr double kFailedForOptimizer = std::numeric_limits<double>::max();

  HpoResult result;
  std::map<TrialParams, double> cache;

  auto failures_in_window = [&] {
    const std::size_t n = std::min(options.failure_window, result.history.size());
    return static_cast<std::size_t>(std::count_if(result.history.end() - static_cast<std::ptrdiff_t>(n),
                                                  result.history.end(),
                                                  [](const TrialRecord& r) { return r.failed; }));
  };
  const auto abort_threshold = static_cast<std::size_t>(
      std::ceil(options.failure_fraction * static_cast<double>(options.failure_window)));

  const Objective objective = [&](std::span<const double> genes) -> double {
    TrialParams params = decode(genes, space);
    if (auto hit = cache.find(params); hit != cache.end())
      return hit->second;

    TrialRecord record;
    record.trial_id = result.history.size() + 1;
    record.params = params;
    const auto start = Clock::now();
    EvalOutcome outcome = evaluator.evaluate(record.trial_id, params);
    ++result.evaluator_calls;
    if (outcome.status == EvalOutcome::Status::Transport) {
      outcome = evaluator.evaluate(record.trial_id, params);
      ++result.evaluator_calls;
    }
    record.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    if (outcome.status == EvalOutcome::Status::Ok && std::isfinite(outcome.fitness)) {
      record.fitness = outcome.fitness;
    } else {
      record.failed = true;
      record.fitness = std::numeric_limits<double>::infinity();
      record.error = outcome.status == EvalOutcome::Status::Ok ? "non-finite fitness" : outcome.error;
    }
    const double for_optimizer = record.failed ? kFailedForOptimizer : record.fitness;
    cache.emplace(std::move(params), for_optimizer);
    result.history.push_back(std::move(record));

    if (failures_in_window() >= abort_threshold)
      throw HpoAborted(std::to_string(failures_in_window()) + " of the last " +
                       std::to_string(std::min(options.failure_window, result.history.size())) +
                       " trials failed; last error: " + result.history.back().error);
    return for_optimizer;
  };

  result.run = run_optimizer(objective, as_search_space(space), cfg);

  const auto best = std::min_element(result.history.begin(), result.history.end(),
                                     [](const TrialRecord& a, const TrialRecord& b) { return a.fitness < b.fitness; });
  if (best != result.history.end())
    result.best = *best;
  return result;
}

double random_search_surrogate(const HyperparameterSpace& space, std::size_t samples,
                               std::uint64_t seed) {
  Rng rng(seed);
  const SearchSpace box = as_search_space(space);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(box.dims());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
    best = std::min(best, surrogate_objective(decode(x, space)));
  }
  return best;
}

} // namespace agto::hpo
