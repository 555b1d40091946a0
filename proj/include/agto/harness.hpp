#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agto/benchmarks.hpp"
#include "agto/gto.hpp"
#include "agto/hpo.hpp"
#include "agto/stats.hpp"

namespace agto::harness {

enum class Algorithm { Agto, Gto };

std::string_view to_string(Algorithm a);
// Throws LookupError.
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  std::vector<bench::FunctionId> functions = all_functions();
  std::vector<Algorithm> algorithms{Algorithm::Agto, Algorithm::Gto};
  std::size_t runs = 30;
  std::size_t pop_size = 30;
  std::size_t max_evals = 15000;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir;
  // Feature switches for the agto variant; gto always has both off.
  bool enable_obl = true;
  bool enable_qrg = true;
  std::size_t workers = 1;
  // Stop after this many newly computed cells (simulates an interruption).
  std::optional<std::size_t> max_new_cells;

  static std::vector<bench::FunctionId> all_functions();
};

// seed = m(m(m(m(base) ^ algo) ^ function) ^ run), m = splitmix64 finalizer,
// algo: agto = 0, gto = 1; function: 1..23; run: 0-based.
std::uint64_t cell_seed(std::uint64_t base_seed, Algorithm algo, bench::FunctionId fn,
                        std::size_t run);

OptimizerConfig optimizer_config(const ExperimentConfig& cfg, Algorithm algo, std::uint64_t seed);

// Single benchmark run with the F7 noise drawn from the run's stream.
RunResult run_benchmark(bench::FunctionId fn, const OptimizerConfig& cfg);

struct CellResult {
  Algorithm algorithm;
  bench::FunctionId function;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double best = 0.0;
  std::size_t evals_used = 0;
};

struct FunctionRow {
  bench::FunctionId function;
  std::vector<stats::Summary> summaries; // per algorithm
  std::vector<std::size_t> runs;         // per algorithm
  std::vector<double> p_values;          // per algorithm vs the reference
};

struct Report {
  std::vector<Algorithm> algorithms;
  Algorithm reference;
  std::vector<FunctionRow> rows;
  stats::RankTable ranks;
};

struct CampaignSummary {
  std::vector<CellResult> cells; // canonical order: algorithm, function, run
  Report report;
  std::size_t computed = 0;      // cells run in this call
  bool complete = true;
};

// Throws IoError if the output directory is unusable, ConfigError if it holds
// a manifest from a different configuration.
CampaignSummary run_campaign(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Stats over completed cells. Reference for p-values is agto when present,
// otherwise the first algorithm.
Report build_report(const std::vector<CellResult>& cells, const std::vector<bench::FunctionId>& functions,
                    const std::vector<Algorithm>& algorithms);

void write_report_files(const std::filesystem::path& dir, const Report& report);
void print_report(std::ostream& os, const Report& report);
std::string final_rank_line(const Report& report);

// Reads runs.csv from a campaign directory. Throws ParseError with file and line.
std::vector<CellResult> load_runs(const std::filesystem::path& dir);
Report report_from_directory(const std::filesystem::path& dir);

// Shortest round-trip decimal; "NaN" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

struct HpoSessionConfig {
  std::optional<std::string> evaluator_cmd; // built-in surrogate when empty
  std::size_t budget = 2000;
  std::size_t pop_size = 30;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::chrono::duration<double> timeout = std::chrono::seconds(300);
};

// Writes trials.csv and best.json into the output directory.
hpo::HpoResult run_hpo_session(const HpoSessionConfig& cfg, std::ostream* log = nullptr);

} // namespace agto::harness
