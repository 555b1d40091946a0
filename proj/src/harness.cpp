#include "agto/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "agto/errors.hpp"
#include "agto/evaluator_client.hpp"

namespace agto::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kRunsHeader = "function,algorithm,run,seed,best,evals_used";

std::string cell_key(Algorithm a, bench::FunctionId f, std::size_t run) {
  return std::string(to_string(a)) + "/" + bench::to_string(f) + "/" + std::to_string(run);
}

std::string conv_name(Algorithm a, bench::FunctionId f, std::size_t run) {
  return std::string(to_string(a)) + "_" + bench::to_string(f) + "_" + std::to_string(run) + ".csv";
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out)
      throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out)
      throw IoError("directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  std::vector<std::string> fns, algos;
  for (auto f : cfg.functions)
    fns.push_back(bench::to_string(f));
  for (auto a : cfg.algorithms)
    algos.emplace_back(to_string(a));
  j["functions"] = fns;
  j["algorithms"] = algos;
  j["runs"] = cfg.runs;
  j["pop_size"] = cfg.pop_size;
  j["max_evals"] = cfg.max_evals;
  j["base_seed"] = cfg.base_seed;
  j["enable_obl"] = cfg.enable_obl;
  j["enable_qrg"] = cfg.enable_qrg;
  return j;
}

std::string convergence_csv(const RunResult& r) {
  std::string out = "iter,evals,best,mean\n";
  for (std::size_t i = 0; i < r.convergence.size(); ++i)
    out += std::to_string(i + 1) + "," + std::to_string(r.evals_at_iteration[i]) + "," +
           format_double(r.convergence[i]) + "," + format_double(r.mean_fitness[i]) + "\n";
  return out;
}

std::string runs_csv(const std::vector<CellResult>& cells) {
  std::string out = std::string(kRunsHeader) + "\n";
  for (const auto& c : cells)
    out += bench::to_string(c.function) + "," + std::string(to_string(c.algorithm)) + "," +
           std::to_string(c.run) + "," + std::to_string(c.seed) + "," + format_double(c.best) + "," +
           std::to_string(c.evals_used) + "\n";
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ','))
    fields.push_back(field);
  if (!line.empty() && line.back() == ',')
    fields.emplace_back();
  return fields;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::size_t index_of(const std::vector<Algorithm>& algos, Algorithm a) {
  return static_cast<std::size_t>(std::find(algos.begin(), algos.end(), a) - algos.begin());
}

} // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::Agto ? "agto" : "gto"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "agto")
    return Algorithm::Agto;
  if (name == "gto")
    return Algorithm::Gto;
  throw LookupError("unknown algorithm '" + std::string(name) + "'");
}

std::vector<bench::FunctionId> ExperimentConfig::all_functions() {
  std::vector<bench::FunctionId> out;
  for (const auto& d : bench::suite())
    out.push_back(d.id);
  return out;
}

std::uint64_t cell_seed(std::uint64_t base_seed, Algorithm algo, bench::FunctionId fn, std::size_t run) {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ (algo == Algorithm::Agto ? 0u : 1u));
  h = mix64(h ^ static_cast<std::uint64_t>(fn));
  return mix64(h ^ run);
}

OptimizerConfig optimizer_config(const ExperimentConfig& cfg, Algorithm algo, std::uint64_t seed) {
  OptimizerConfig oc;
  oc.pop_size = cfg.pop_size;
  oc.max_evals = cfg.max_evals;
  oc.seed = seed;
  oc.enable_obl = algo == Algorithm::Agto && cfg.enable_obl;
  oc.enable_qrg = algo == Algorithm::Agto && cfg.enable_qrg;
  return oc;
}

RunResult run_benchmark(bench::FunctionId fn, const OptimizerConfig& cfg) {
  const NoisyObjective f = [fn](std::span<const double> x, Rng& rng) { return bench::evaluate(fn, x, rng); };
  return run_optimizer(f, bench::descriptor(fn).space(), cfg);
}

std::string format_double(double v) {
  if (std::isnan(v))
    return "NaN";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CampaignSummary run_campaign(const ExperimentConfig& cfg, std::ostream* log) {
  if (cfg.functions.empty() || cfg.algorithms.empty() || cfg.runs == 0)
    throw ConfigError("campaign needs at least one function, algorithm and run");
  for (auto a : cfg.algorithms)
    optimizer_config(cfg, a, 0).validate();
  ensure_writable(cfg.output_dir);
  ensure_writable(cfg.output_dir / "conv");

  struct Cell {
    Algorithm algo;
    bench::FunctionId fn;
    std::size_t run;
  };
  std::vector<Cell> cells;
  for (auto a : cfg.algorithms)
    for (auto f : cfg.functions)
      for (std::size_t r = 0; r < cfg.runs; ++r)
        cells.push_back({a, f, r});

  // Resume from the manifest when it belongs to the same configuration.
  const fs::path manifest_path = cfg.output_dir / "manifest.json";
  const json config = config_json(cfg);
  std::map<std::string, CellResult> done;
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json m;
    try {
      m = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError(manifest_path.string(), 1, e.what());
    }
    if (m.value("config", json{}) != config)
      throw ConfigError(cfg.output_dir.string() + " holds a campaign with a different configuration");
    for (const auto& c : m.at("cells")) {
      CellResult r{parse_algorithm(c.at("algorithm").get<std::string>()),
                   bench::parse_id(c.at("function").get<std::string>()), c.at("run").get<std::size_t>(),
                   c.at("seed").get<std::uint64_t>(), c.at("best").get<double>(),
                   c.at("evals_used").get<std::size_t>()};
      done.emplace(c.at("key").get<std::string>(), r);
    }
  }

  std::vector<std::optional<CellResult>> results(cells.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (auto it = done.find(cell_key(cells[i].algo, cells[i].fn, cells[i].run)); it != done.end())
      results[i] = it->second;
    else
      pending.push_back(i);
  }
  if (cfg.max_new_cells && pending.size() > *cfg.max_new_cells)
    pending.resize(*cfg.max_new_cells);

  std::mutex writer;
  auto write_manifest = [&] {
    json m;
    m["config"] = config;
    m["cells"] = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!results[i])
        continue;
      const auto& r = *results[i];
      m["cells"].push_back({{"key", cell_key(r.algorithm, r.function, r.run)},
                            {"algorithm", to_string(r.algorithm)},
                            {"function", bench::to_string(r.function)},
                            {"run", r.run},
                            {"seed", r.seed},
                            {"best", r.best},
                            {"evals_used", r.evals_used}});
    }
    write_file_atomic(manifest_path, m.dump(1) + "\n");
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size())
        return;
      const Cell& cell = cells[pending[k]];
      const std::uint64_t seed = cell_seed(cfg.base_seed, cell.algo, cell.fn, cell.run);
      try {
        const OptimizerConfig oc = optimizer_config(cfg, cell.algo, seed);
        const RunResult r = run_benchmark(cell.fn, oc);
        if (r.evals_used > oc.max_evals)
          throw Error("cell " + cell_key(cell.algo, cell.fn, cell.run) + " exceeded its budget");
        const std::string conv = convergence_csv(r);
        std::lock_guard lock(writer);
        write_file_atomic(cfg.output_dir / "conv" / conv_name(cell.algo, cell.fn, cell.run), conv);
        results[pending[k]] = CellResult{cell.algo, cell.fn, cell.run, seed, r.best_fitness, r.evals_used};
        write_manifest();
        if (log)
          *log << "done " << cell_key(cell.algo, cell.fn, cell.run) << " best=" << format_double(r.best_fitness)
               << "\n";
      } catch (...) {
        std::lock_guard lock(writer);
        if (!failure)
          failure = std::current_exception();
        next = pending.size();
        return;
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, pending.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  CampaignSummary summary;
  summary.computed = pending.size();
  for (const auto& r : results) {
    if (r)
      summary.cells.push_back(*r);
    else
      summary.complete = false;
  }
  write_file_atomic(cfg.output_dir / "runs.csv", runs_csv(summary.cells));
  if (summary.complete) {
    summary.report = build_report(summary.cells, cfg.functions, cfg.algorithms);
    write_report_files(cfg.output_dir, summary.report);
  }
  return summary;
}

Report build_report(const std::vector<CellResult>& cells, const std::vector<bench::FunctionId>& functions,
                    const std::vector<Algorithm>& algorithms) {
  Report report;
  report.algorithms = algorithms;
  report.reference = index_of(algorithms, Algorithm::Agto) < algorithms.size() ? Algorithm::Agto
                                                                               : algorithms.front();
  const std::size_t ref = index_of(algorithms, report.reference);

  std::vector<std::vector<double>> avg, sd;
  for (auto fn : functions) {
    std::vector<std::vector<double>> samples(algorithms.size());
    for (const auto& c : cells)
      if (c.function == fn)
        if (auto a = index_of(algorithms, c.algorithm); a < algorithms.size())
          samples[a].push_back(c.best);

    FunctionRow row{fn, {}, {}, {}};
    for (const auto& s : samples) {
      if (s.empty())
        throw InputError("no runs recorded for " + bench::to_string(fn));
      row.summaries.push_back(stats::summarize(s));
      row.runs.push_back(s.size());
    }
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      if (a == ref || samples[a].size() < 2 || samples[ref].size() < 2)
        row.p_values.push_back(std::numeric_limits<double>::quiet_NaN());
      else
        row.p_values.push_back(stats::wilcoxon_rank_sum(samples[ref], samples[a]));
    }
    avg.emplace_back();
    sd.emplace_back();
    for (const auto& s : row.summaries) {
      avg.back().push_back(s.avg);
      sd.back().push_back(s.std);
    }
    report.rows.push_back(std::move(row));
  }
  report.ranks = stats::friedman_ranks(avg, sd);
  return report;
}

void write_report_files(const fs::path& dir, const Report& report) {
  std::string summary = "function,algorithm,avg,std,runs\n";
  std::string ranks = "function,algorithm,rank\n";
  std::string pvalues = "function,algorithm,p_value\n";
  for (std::size_t f = 0; f < report.rows.size(); ++f) {
    const auto& row = report.rows[f];
    const std::string fn = bench::to_string(row.function);
    for (std::size_t a = 0; a < report.algorithms.size(); ++a) {
      const std::string algo(to_string(report.algorithms[a]));
      summary += fn + "," + algo + "," + format_double(row.summaries[a].avg) + "," +
                 format_double(row.summaries[a].std) + "," + std::to_string(row.runs[a]) + "\n";
      ranks += fn + "," + algo + "," + std::to_string(report.ranks.per_function_ranks[f][a]) + "\n";
      pvalues += fn + "," + algo + "," + format_double(row.p_values[a]) + "\n";
    }
  }
  for (std::size_t a = 0; a < report.algorithms.size(); ++a)
    ranks += "rank_sum," + std::string(to_string(report.algorithms[a])) + "," +
             format_double(report.ranks.rank_sum[a]) + "\n";
  for (std::size_t a = 0; a < report.algorithms.size(); ++a)
    ranks += "average_rank," + std::string(to_string(report.algorithms[a])) + "," +
             format_double(report.ranks.average_rank[a]) + "\n";
  for (std::size_t a = 0; a < report.algorithms.size(); ++a)
    ranks += "final_rank," + std::string(to_string(report.algorithms[a])) + "," +
             std::to_string(report.ranks.final_rank[a]) + "\n";
  write_file_atomic(dir / "summary.csv", summary);
  write_file_atomic(dir / "ranks.csv", ranks);
  write_file_atomic(dir / "pvalues.csv", pvalues);
}

std::string final_rank_line(const Report& report) {
  std::string line = "final rank:";
  for (std::size_t a = 0; a < report.algorithms.size(); ++a)
    line += " " + std::string(to_string(report.algorithms[a])) + "=" +
            std::to_string(report.ranks.final_rank[a]) + " (avg " +
            format_double(report.ranks.average_rank[a]) + ")";
  return line;
}

void print_report(std::ostream& os, const Report& report) {
  os << std::left << std::setw(9) << "function";
  for (auto a : report.algorithms) {
    const std::string n(to_string(a));
    os << std::setw(14) << (n + ".avg") << std::setw(14) << (n + ".std") << std::setw(7) << (n + ".rk")
       << std::setw(14) << (n + ".p");
  }
  os << "\n";
  for (std::size_t f = 0; f < report.rows.size(); ++f) {
    const auto& row = report.rows[f];
    os << std::setw(9) << bench::to_string(row.function);
    for (std::size_t a = 0; a < report.algorithms.size(); ++a) {
      std::ostringstream avg, sd, p;
      avg << std::setprecision(6) << row.summaries[a].avg;
      sd << std::setprecision(6) << row.summaries[a].std;
      p << std::setprecision(4) << row.p_values[a];
      os << std::setw(14) << avg.str() << std::setw(14) << sd.str() << std::setw(7)
         << report.ranks.per_function_ranks[f][a] << std::setw(14)
         << (std::isnan(row.p_values[a]) ? std::string("NaN") : p.str());
    }
    os << "\n";
  }
  os << std::setw(9) << "rank_sum";
  for (std::size_t a = 0; a < report.algorithms.size(); ++a)
    os << std::setw(49) << format_double(report.ranks.rank_sum[a]);
  os << "\n" << final_rank_line(report) << "\n";
}

std::vector<CellResult> load_runs(const fs::path& dir) {
  const fs::path path = dir / "runs.csv";
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::vector<CellResult> cells;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (lineno == 1) {
      if (line != kRunsHeader)
        throw ParseError(path.string(), lineno, "unexpected header '" + line + "'");
      continue;
    }
    if (line.empty())
      continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6)
      throw ParseError(path.string(), lineno, "expected 6 fields, got " + std::to_string(fields.size()));
    CellResult c{};
    try {
      c.function = bench::parse_id(fields[0]);
      c.algorithm = parse_algorithm(fields[1]);
    } catch (const LookupError& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    if (!parse_number(fields[2], c.run) || !parse_number(fields[3], c.seed) ||
        !parse_number(fields[4], c.best) || !parse_number(fields[5], c.evals_used))
      throw ParseError(path.string(), lineno, "malformed numeric field");
    cells.push_back(c);
  }
  if (lineno == 0)
    throw ParseError(path.string(), 1, "empty file");
  return cells;
}

Report report_from_directory(const fs::path& dir) {
  const auto cells = load_runs(dir);
  std::vector<bench::FunctionId> functions;
  std::vector<Algorithm> algorithms;
  for (const auto& c : cells) {
    if (std::find(functions.begin(), functions.end(), c.function) == functions.end())
      functions.push_back(c.function);
    if (std::find(algorithms.begin(), algorithms.end(), c.algorithm) == algorithms.end())
      algorithms.push_back(c.algorithm);
  }
  if (cells.empty())
    throw InputError(dir.string() + "/runs.csv holds no runs");
  std::sort(functions.begin(), functions.end());
  return build_report(cells, functions, algorithms);
}

hpo::HpoResult run_hpo_session(const HpoSessionConfig& cfg, std::ostream* log) {
  ensure_writable(cfg.output_dir);
  OptimizerConfig oc;
  oc.pop_size = cfg.pop_size;
  oc.max_evals = cfg.budget;
  oc.seed = cfg.seed;
  oc.validate();

  hpo::HpoResult result;
  if (cfg.evaluator_cmd && !cfg.evaluator_cmd->empty()) {
    hpo::SubprocessEvaluator evaluator(*cfg.evaluator_cmd, cfg.timeout);
    result = hpo::run_hpo({}, evaluator, oc);
  } else {
    hpo::SurrogateEvaluator evaluator;
    result = hpo::run_hpo({}, evaluator, oc);
  }

  std::string trials = "trial_id,neurons,learning_rate,batch_size,epochs,activation,fitness,wall_time,failed\n";
  for (const auto& t : result.history)
    trials += std::to_string(t.trial_id) + "," + std::to_string(t.params.neurons) + "," +
              format_double(t.params.learning_rate) + "," + std::to_string(t.params.batch_size) + "," +
              std::to_string(t.params.epochs) + "," + t.params.activation + "," + format_double(t.fitness) +
              "," + format_double(t.wall_time) + "," + (t.failed ? "1" : "0") + "\n";
  write_file_atomic(cfg.output_dir / "trials.csv", trials);

  json best;
  best["trial_id"] = result.best.trial_id;
  best["neurons"] = result.best.params.neurons;
  best["learning_rate"] = result.best.params.learning_rate;
  best["batch_size"] = result.best.params.batch_size;
  best["epochs"] = result.best.params.epochs;
  best["activation"] = result.best.params.activation;
  best["fitness"] = result.best.fitness;
  best["trials"] = result.history.size();
  best["optimizer_evals"] = result.run.evals_used;
  write_file_atomic(cfg.output_dir / "best.json", best.dump(2) + "\n");

  if (log)
    *log << "best trial " << result.best.trial_id << ": neurons=" << result.best.params.neurons
         << " learning_rate=" << format_double(result.best.params.learning_rate)
         << " batch_size=" << result.best.params.batch_size << " epochs=" << result.best.params.epochs
         << " activation=" << result.best.params.activation << " fitness=" << format_double(result.best.fitness)
         << " (" << result.history.size() << " distinct trials)\n";
  return result;
}

} // namespace agto::harness
