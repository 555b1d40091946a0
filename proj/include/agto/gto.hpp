#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "agto/random.hpp"
#include "agto/search_space.hpp"

// Amended gorilla troop optimizer: GTO population dynamics with optional
// opposition-based initialization and quantum-rotation-gate mutation.
// Minimization throughout.

namespace agto {

using Position = std::vector<double>;

using Objective = std::function<double(std::span<const double>)>;
// Objective that may consume the run's random stream (noisy benchmarks).
using NoisyObjective = std::function<double(std::span<const double>, Rng&)>;

struct Individual {
  Position position;
  double fitness = std::numeric_limits<double>::quiet_NaN();

  bool evaluated() const { return fitness == fitness; }
};

struct Population {
  std::vector<Individual> members;
  std::size_t best_index = 0;

  std::size_t size() const { return members.size(); }
  const Individual& best() const { return members[best_index]; }
  const Individual& operator[](std::size_t i) const { return members[i]; }

  // Recomputes best_index; first minimum wins.
  void refresh_best();
  double worst_fitness() const;
  double mean_fitness() const;
  Position mean_position() const;
};

struct OptimizerConfig {
  std::size_t pop_size = 30;
  std::size_t max_evals = 15000;
  double p = 0.03;
  double beta = 3.0;
  double w = 0.8;
  bool enable_obl = true;
  bool enable_qrg = true;
  double theta_min = 0.001 * 3.14159265358979323846;
  double theta_max = 0.035 * 3.14159265358979323846;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;

  std::size_t init_cost() const { return enable_obl ? 2 * pop_size : pop_size; }
  std::size_t evals_per_iteration() const { return (enable_qrg ? 3 : 2) * pop_size; }
  // Iteration ceiling for the C schedule, derived from the evaluation budget.
  std::size_t max_iterations() const;

  static OptimizerConfig plain_gto() {
    OptimizerConfig cfg;
    cfg.enable_obl = false;
    cfg.enable_qrg = false;
    return cfg;
  }
};

struct IterationState {
  std::size_t iter = 0;
  std::size_t max_iter = 1;
  double c = 0.0;
  double f = 0.0;
};

struct RunResult {
  Position best_position;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<double> convergence;  // best-so-far after each iteration
  std::vector<double> mean_fitness; // population mean after each iteration
  std::vector<std::size_t> evals_at_iteration;
  std::size_t evals_used = 0;
  // Instrumentation for ablation checks.
  std::size_t obl_invocations = 0;
  std::size_t qrg_invocations = 0;

  bool operator==(const RunResult&) const = default;
};

// Counts objective calls against a hard budget, rejects non-finite values and
// remembers the best point ever evaluated.
class BudgetedObjective {
public:
  BudgetedObjective(NoisyObjective f, std::size_t max_evals, Rng& rng);

  // Returns nullopt without calling the objective when the budget is spent.
  // Throws EvaluationError on NaN/inf.
  std::optional<double> operator()(std::span<const double> x);

  std::size_t used() const { return used_; }
  std::size_t remaining() const { return max_evals_ - used_; }
  bool exhausted() const { return used_ >= max_evals_; }
  double best_fitness() const { return best_fitness_; }
  const Position& best_position() const { return best_position_; }

private:
  NoisyObjective f_;
  std::size_t max_evals_;
  Rng& rng_;
  std::size_t used_ = 0;
  double best_fitness_ = std::numeric_limits<double>::infinity();
  Position best_position_;
};

// --- population setup ------------------------------------------------------

Population init_population(const SearchSpace& space, std::size_t n, Rng& rng);

// Mirror of every member through the box centre: lower + upper - x, clamped
// against rounding. Exact involution whenever lower + upper - x rounds
// exactly (always for symmetric boxes).
Population opposition_of(const Population& pop, const SearchSpace& space);

// --- schedule --------------------------------------------------------------

// F = cos(2 r5) + 1, C = F (1 - iter / max_iter).
IterationState schedule_from_draw(std::size_t iter, std::size_t max_iter, double r5);
IterationState update_schedule(std::size_t iter, std::size_t max_iter, Rng& rng);

// --- exploration -----------------------------------------------------------

enum class ExplorationBranch { Relocate, TowardMember, AroundCandidate };

struct ExplorationDraws {
  double r4 = 0.0;
  double l = 0.0; // in [-1, 1]
  double r2 = 0.0;
  double r3 = 0.0;
  double r1 = 0.0;        // relocation; one scalar, so the point lies on the box diagonal
  std::vector<double> z;  // in [-c, c], one per dimension
  std::size_t member = 0;    // X_rand, index into the incumbents
  std::size_t candidate = 0; // GP_rand, index into this sweep's candidates
};

ExplorationBranch exploration_branch(double r4, double p);

// Draw order: r4; relocation: r1; otherwise l, then either
// (r2, z[0..d), member) or (r3, candidate).
ExplorationDraws draw_exploration(std::size_t dims, std::size_t pop_size,
                                  std::size_t candidates_so_far, const IterationState& state,
                                  double p, Rng& rng);

// When `candidates` is empty, GP_rand falls back to incumbent `draws.candidate`.
Position apply_exploration(std::span<const double> x, const ExplorationDraws& draws,
                           const Population& pop, std::span<const Position> candidates,
                           const IterationState& state, const SearchSpace& space, double p);

Position exploration_move(std::span<const double> x, const Population& pop,
                          std::span<const Position> candidates, const IterationState& state,
                          const SearchSpace& space, const OptimizerConfig& cfg, Rng& rng);

// --- exploitation ----------------------------------------------------------

// M[j] = (|mean[j]|^g)^(1/g), with 0^g taken as 0.
Position silverback_influence(std::span<const double> mean, double g);

Position apply_follow_silverback(std::span<const double> x, std::span<const double> silverback,
                                 std::span<const double> mean, double L,
                                 const SearchSpace& space);

// Draws l ~ U[-1, 1]; L = c l; g = 2^L.
Position follow_silverback(std::span<const double> x, const Population& pop,
                           const IterationState& state, const SearchSpace& space, Rng& rng);

struct CompetitionDraws {
  double q = 0.0;        // 2 r6 - 1
  std::vector<double> e; // standard normals; all equal in the scalar case
};

// Draw order: r7, then E (d normals if r7 >= 0.5, else one), then r6.
CompetitionDraws draw_competition(std::size_t dims, Rng& rng);

Position apply_competition(std::span<const double> x, std::span<const double> silverback,
                           const CompetitionDraws& draws, double beta,
                           const SearchSpace& space);

Position compete_for_females(std::span<const double> x, const Individual& best,
                             const OptimizerConfig& cfg, const SearchSpace& space, Rng& rng);

// --- quantum rotation gate -------------------------------------------------

// 1 - exp(-4 ((best - f) / (best - worst))^2); 0 when best == worst.
double qrg_gamma(double fitness, double best_fitness, double worst_fitness);
double qrg_delta_theta(double gamma, double theta_min, double theta_max);

void rotate_pair(double& a, double& b, double theta);

// +1 if rotating (a, b) counter-clockwise moves it toward (a_best, b_best), else -1.
double rotation_direction(double a, double b, double a_best, double b_best);

// Rotates consecutive coordinate pairs (0,1),(2,3),... by delta_theta with a
// per-pair direction toward `silverback`; an odd trailing coordinate is kept.
Position qrg_rotate(std::span<const double> x, std::span<const double> silverback,
                    double delta_theta, const SearchSpace& space);

// Mutated copies of every member, unevaluated. Deterministic: the direction
// rule leaves nothing to chance.
Population qrg_mutate(const Population& pop, const OptimizerConfig& cfg, const SearchSpace& space);

// --- selection -------------------------------------------------------------

struct SelectionOutcome {
  Population population;
  bool budget_exhausted = false;
};

// Evaluates candidates in order; a candidate replaces its incumbent only on
// strict improvement. Slots left unevaluated when the budget runs out keep
// the incumbent.
SelectionOutcome greedy_select(const Population& incumbents, const std::vector<Position>& candidates,
                               BudgetedObjective& objective);

// Best N of the 2N union, ascending fitness; ties keep `pop` members first,
// then lower index.
Population pool_select(const Population& pop, const Population& mutated);

// Evaluates every member in place. Returns false if the budget ran out.
bool evaluate_all(Population& pop, BudgetedObjective& objective);

// --- driver ----------------------------------------------------------------

// Called with the population at every iteration boundary (after the
// initialization as iteration 0, then after each completed iteration).
using IterationObserver = std::function<void(std::size_t iteration, const Population& pop)>;

RunResult run_optimizer(const NoisyObjective& objective, const SearchSpace& space,
                        const OptimizerConfig& cfg, const IterationObserver& observer = {});
RunResult run_optimizer(const Objective& objective, const SearchSpace& space,
                        const OptimizerConfig& cfg, const IterationObserver& observer = {});

} // namespace agto
