#include "agto/gto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "agto/errors.hpp"

namespace agto {

namespace {

std::string describe(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t j = 0; j < x.size(); ++j)
    os << (j ? ", " : "") << x[j];
  os << ')';
  return os.str();
}

void check_dims(std::span<const double> x, const SearchSpace& space) {
  if (x.size() != space.dims())
    throw DimensionError("position has " + std::to_string(x.size()) + " components, expected " +
                         std::to_string(space.dims()));
}

} // namespace

// --- Population ------------------------------------------------------------

void Population::refresh_best() {
  best_index = 0;
  for (std::size_t i = 1; i < members.size(); ++i)
    if (members[i].fitness < members[best_index].fitness)
      best_index = i;
}

double Population::worst_fitness() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& m : members)
    worst = std::max(worst, m.fitness);
  return worst;
}

double Population::mean_fitness() const {
  double sum = 0.0;
  for (const auto& m : members)
    sum += m.fitness;
  return members.empty() ? 0.0 : sum / static_cast<double>(members.size());
}

Position Population::mean_position() const {
  if (members.empty())
    return {};
  Position mean(members.front().position.size(), 0.0);
  for (const auto& m : members)
    for (std::size_t j = 0; j < mean.size(); ++j)
      mean[j] += m.position[j];
  for (auto& v : mean)
    v /= static_cast<double>(members.size());
  return mean;
}

// --- OptimizerConfig -------------------------------------------------------

void OptimizerConfig::validate() const {
  if (pop_size < 2)
    throw ConfigError("pop_size must be at least 2");
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("p must lie in (0, 1)");
  if (!(beta > 0.0))
    throw ConfigError("beta must be positive");
  if (!(w > 0.0))
    throw ConfigError("w must be positive");
  if (!(theta_min < theta_max))
    throw ConfigError("theta_min must be below theta_max");
  if (max_evals < init_cost())
    throw ConfigError("max_evals (" + std::to_string(max_evals) +
                      ") is smaller than the initialization cost (" +
                      std::to_string(init_cost()) + ")");
}

std::size_t OptimizerConfig::max_iterations() const {
  if (max_evals < init_cost())
    return 0;
  return (max_evals - init_cost()) / evals_per_iteration();
}

// --- BudgetedObjective -----------------------------------------------------

BudgetedObjective::BudgetedObjective(NoisyObjective f, std::size_t max_evals, Rng& rng)
    : f_(std::move(f)), max_evals_(max_evals), rng_(rng) {}

std::optional<double> BudgetedObjective::operator()(std::span<const double> x) {
  if (exhausted())
    return std::nullopt;
  ++used_;
  const double value = f_(x, rng_);
  if (!std::isfinite(value))
    throw EvaluationError("objective returned " + std::to_string(value) + " at " + describe(x),
                          Position(x.begin(), x.end()));
  if (value < best_fitness_) {
    best_fitness_ = value;
    best_position_.assign(x.begin(), x.end());
  }
  return value;
}

// --- setup -----------------------------------------------------------------

Population init_population(const SearchSpace& space, std::size_t n, Rng& rng) {
  if (n < 2)
    throw ConfigError("population needs at least 2 members");
  Population pop;
  pop.members.resize(n);
  for (auto& m : pop.members) {
    m.position.resize(space.dims());
    for (std::size_t j = 0; j < space.dims(); ++j)
      m.position[j] = rng.uniform(space.lower()[j], space.upper()[j]);
  }
  return pop;
}

Population opposition_of(const Population& pop, const SearchSpace& space) {
  Population out;
  out.members.reserve(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& x = pop[i].position;
    check_dims(x, space);
    if (!space.contains(x))
      throw PreconditionError("member " + std::to_string(i) + " lies outside the search space");
    Individual o;
    o.position.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      o.position[j] = space.lower()[j] + space.upper()[j] - x[j];
    space.clamp(o.position);
    out.members.push_back(std::move(o));
  }
  return out;
}

// --- schedule --------------------------------------------------------------

IterationState schedule_from_draw(std::size_t iter, std::size_t max_iter, double r5) {
  if (max_iter == 0 || iter >= max_iter)
    throw PreconditionError("iteration " + std::to_string(iter) + " outside [0, " +
                            std::to_string(max_iter) + ")");
  IterationState s;
  s.iter = iter;
  s.max_iter = max_iter;
  s.f = std::cos(2.0 * r5) + 1.0;
  s.c = s.f * (1.0 - static_cast<double>(iter) / static_cast<double>(max_iter));
  return s;
}

IterationState update_schedule(std::size_t iter, std::size_t max_iter, Rng& rng) {
  return schedule_from_draw(iter, max_iter, rng.uniform());
}

// --- exploration -----------------------------------------------------------

ExplorationBranch exploration_branch(double r4, double p) {
  if (r4 < p)
    return ExplorationBranch::Relocate;
  if (r4 >= 0.5)
    return ExplorationBranch::TowardMember;
  return ExplorationBranch::AroundCandidate;
}

ExplorationDraws draw_exploration(std::size_t dims, std::size_t pop_size,
                                  std::size_t candidates_so_far, const IterationState& state,
                                  double p, Rng& rng) {
  ExplorationDraws d;
  d.r4 = rng.uniform();
  switch (exploration_branch(d.r4, p)) {
  case ExplorationBranch::Relocate:
    d.r1 = rng.uniform();
    break;
  case ExplorationBranch::TowardMember:
    d.l = rng.uniform(-1.0, 1.0);
    d.r2 = rng.uniform();
    d.z.resize(dims);
    for (auto& z : d.z)
      z = rng.uniform(-state.c, state.c);
    d.member = rng.index(pop_size);
    break;
  case ExplorationBranch::AroundCandidate:
    d.l = rng.uniform(-1.0, 1.0);
    d.r3 = rng.uniform();
    d.candidate = rng.index(candidates_so_far > 0 ? candidates_so_far : pop_size);
    break;
  }
  return d;
}

Position apply_exploration(std::span<const double> x, const ExplorationDraws& d,
                           const Population& pop, std::span<const Position> candidates,
                           const IterationState& state, const SearchSpace& space, double p) {
  check_dims(x, space);
  const std::size_t dims = x.size();
  Position out(dims);
  const double L = state.c * d.l;
  switch (exploration_branch(d.r4, p)) {
  case ExplorationBranch::Relocate:
    for (std::size_t j = 0; j < dims; ++j)
      out[j] = (space.upper()[j] - space.lower()[j]) * d.r1 + space.lower()[j];
    break;
  case ExplorationBranch::TowardMember: {
    const auto& xr = pop[d.member].position;
    for (std::size_t j = 0; j < dims; ++j)
      out[j] = (d.r2 - state.c) * xr[j] + L * (d.z[j] * x[j]);
    break;
  }
  case ExplorationBranch::AroundCandidate: {
    const auto& gp = candidates.empty() ? pop[d.candidate].position : candidates[d.candidate];
    for (std::size_t j = 0; j < dims; ++j) {
      const double diff = x[j] - gp[j];
      out[j] = x[j] - L * (L * diff + d.r3 * diff);
    }
    break;
  }
  }
  space.clamp(out);
  return out;
}

Position exploration_move(std::span<const double> x, const Population& pop,
                          std::span<const Position> candidates, const IterationState& state,
                          const SearchSpace& space, const OptimizerConfig& cfg, Rng& rng) {
  const auto draws = draw_exploration(space.dims(), pop.size(), candidates.size(), state, cfg.p, rng);
  return apply_exploration(x, draws, pop, candidates, state, space, cfg.p);
}

// --- exploitation ----------------------------------------------------------

Position silverback_influence(std::span<const double> mean, double g) {
  Position m(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) {
    const double a = std::abs(mean[j]);
    m[j] = a == 0.0 ? 0.0 : std::pow(std::pow(a, g), 1.0 / g);
  }
  return m;
}

Position apply_follow_silverback(std::span<const double> x, std::span<const double> silverback,
                                 std::span<const double> mean, double L,
                                 const SearchSpace& space) {
  check_dims(x, space);
  const Position m = silverback_influence(mean, std::exp2(L));
  Position out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    out[j] = L * m[j] * (x[j] - silverback[j]) + x[j];
  space.clamp(out);
  return out;
}

Position follow_silverback(std::span<const double> x, const Population& pop,
                           const IterationState& state, const SearchSpace& space, Rng& rng) {
  const double L = state.c * rng.uniform(-1.0, 1.0);
  return apply_follow_silverback(x, pop.best().position, pop.mean_position(), L, space);
}

CompetitionDraws draw_competition(std::size_t dims, Rng& rng) {
  CompetitionDraws d;
  const double r7 = rng.uniform();
  if (r7 >= 0.5) {
    d.e.resize(dims);
    for (auto& e : d.e)
      e = rng.normal();
  } else {
    d.e.assign(dims, rng.normal());
  }
  d.q = 2.0 * rng.uniform() - 1.0;
  return d;
}

Position apply_competition(std::span<const double> x, std::span<const double> silverback,
                           const CompetitionDraws& d, double beta, const SearchSpace& space) {
  check_dims(x, space);
  Position out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double a = beta * d.e[j];
    out[j] = silverback[j] - (silverback[j] * d.q - x[j] * d.q) * a;
  }
  space.clamp(out);
  return out;
}

Position compete_for_females(std::span<const double> x, const Individual& best,
                             const OptimizerConfig& cfg, const SearchSpace& space, Rng& rng) {
  const auto draws = draw_competition(space.dims(), rng);
  return apply_competition(x, best.position, draws, cfg.beta, space);
}

// --- quantum rotation gate -------------------------------------------------

double qrg_gamma(double fitness, double best_fitness, double worst_fitness) {
  const double span = best_fitness - worst_fitness;
  if (span == 0.0)
    return 0.0;
  const double u = (best_fitness - fitness) / span;
  return 1.0 - std::exp(-4.0 * u * u);
}

double qrg_delta_theta(double gamma, double theta_min, double theta_max) {
  return theta_min + gamma * (theta_max - theta_min);
}

void rotate_pair(double& a, double& b, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double a2 = a * c - b * s;
  const double b2 = a * s + b * c;
  a = a2;
  b = b2;
}

double rotation_direction(double a, double b, double a_best, double b_best) {
  return a * b_best - b * a_best < 0.0 ? -1.0 : 1.0;
}

Position qrg_rotate(std::span<const double> x, std::span<const double> silverback,
                    double delta_theta, const SearchSpace& space) {
  check_dims(x, space);
  Position out(x.begin(), x.end());
  for (std::size_t j = 0; j + 1 < out.size(); j += 2) {
    const double dir = rotation_direction(out[j], out[j + 1], silverback[j], silverback[j + 1]);
    rotate_pair(out[j], out[j + 1], delta_theta * dir);
  }
  space.clamp(out);
  return out;
}

Population qrg_mutate(const Population& pop, const OptimizerConfig& cfg, const SearchSpace& space) {
  const double best = pop.best().fitness;
  const double worst = pop.worst_fitness();
  if (!(best <= worst))
    throw PreconditionError("qrg_mutate requires an evaluated population");
  Population out;
  out.members.reserve(pop.size());
  for (const auto& m : pop.members) {
    const double dtheta = qrg_delta_theta(qrg_gamma(m.fitness, best, worst), cfg.theta_min, cfg.theta_max);
    out.members.push_back({qrg_rotate(m.position, pop.best().position, dtheta, space),
                           std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

// --- selection -------------------------------------------------------------

SelectionOutcome greedy_select(const Population& incumbents, const std::vector<Position>& candidates,
                               BudgetedObjective& objective) {
  if (candidates.size() != incumbents.size())
    throw PreconditionError("candidate count differs from population size");
  SelectionOutcome out{incumbents, false};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto value = objective(candidates[i]);
    if (!value) {
      out.budget_exhausted = true;
      break;
    }
    if (*value < out.population.members[i].fitness)
      out.population.members[i] = {candidates[i], *value};
  }
  out.population.refresh_best();
  return out;
}

Population pool_select(const Population& pop, const Population& mutated) {
  if (pop.size() != mutated.size())
    throw PreconditionError("pool_select needs equally sized populations");
  std::vector<const Individual*> pool;
  pool.reserve(2 * pop.size());
  for (const auto& m : pop.members)
    pool.push_back(&m);
  for (const auto& m : mutated.members)
    pool.push_back(&m);
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Individual* a, const Individual* b) { return a->fitness < b->fitness; });
  Population out;
  out.members.reserve(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i)
    out.members.push_back(*pool[i]);
  out.refresh_best();
  return out;
}

bool evaluate_all(Population& pop, BudgetedObjective& objective) {
  for (auto& m : pop.members) {
    const auto value = objective(m.position);
    if (!value)
      return false;
    m.fitness = *value;
  }
  pop.refresh_best();
  return true;
}

// --- driver ----------------------------------------------------------------

RunResult run_optimizer(const NoisyObjective& objective, const SearchSpace& space,
                        const OptimizerConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  Rng rng(cfg.seed);
  BudgetedObjective evaluate(objective, cfg.max_evals, rng);
  RunResult result;

  Population pop = init_population(space, cfg.pop_size, rng);
  evaluate_all(pop, evaluate);
  if (cfg.enable_obl) {
    ++result.obl_invocations;
    Population opposite = opposition_of(pop, space);
    evaluate_all(opposite, evaluate);
    pop = pool_select(pop, opposite);
  }
  if (observer)
    observer(0, pop);

  const std::size_t max_iter = cfg.max_iterations();
  std::vector<Position> candidates;
  candidates.reserve(cfg.pop_size);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const IterationState state = update_schedule(iter, max_iter, rng);

    candidates.clear();
    for (std::size_t i = 0; i < pop.size(); ++i)
      candidates.push_back(exploration_move(pop[i].position, pop, candidates, state, space, cfg, rng));
    auto explored = greedy_select(pop, candidates, evaluate);
    pop = std::move(explored.population);

    candidates.clear();
    if (state.c >= cfg.w) {
      const Position mean = pop.mean_position();
      for (std::size_t i = 0; i < pop.size(); ++i) {
        const double L = state.c * rng.uniform(-1.0, 1.0);
        candidates.push_back(apply_follow_silverback(pop[i].position, pop.best().position, mean, L, space));
      }
    } else {
      for (std::size_t i = 0; i < pop.size(); ++i)
        candidates.push_back(compete_for_females(pop[i].position, pop.best(), cfg, space, rng));
    }
    auto exploited = greedy_select(pop, candidates, evaluate);
    pop = std::move(exploited.population);

    bool exhausted = explored.budget_exhausted || exploited.budget_exhausted;
    if (cfg.enable_qrg && !exhausted) {
      ++result.qrg_invocations;
      Population mutated = qrg_mutate(pop, cfg, space);
      exhausted = !evaluate_all(mutated, evaluate);
      if (!exhausted)
        pop = pool_select(pop, mutated);
    }

    result.convergence.push_back(evaluate.best_fitness());
    result.mean_fitness.push_back(pop.mean_fitness());
    result.evals_at_iteration.push_back(evaluate.used());
    if (observer)
      observer(iter + 1, pop);
    if (exhausted)
      break;
  }

  result.best_fitness = evaluate.best_fitness();
  result.best_position = evaluate.best_position();
  result.evals_used = evaluate.used();
  return result;
}

RunResult run_optimizer(const Objective& objective, const SearchSpace& space,
                        const OptimizerConfig& cfg, const IterationObserver& observer) {
  return run_optimizer(NoisyObjective([&objective](std::span<const double> x, Rng&) { return objective(x); }),
                       space, cfg, observer);
}

} // namespace agto
