// agto: benchmark campaigns, statistics reports and hyperparameter searches.
//
//   agto bench --functions F1..F23 --algo agto,gto --runs 30 --out results/
//   agto report --in results/
//   agto hpo --budget 2000 --out hpo/ [--evaluator-cmd "python3 evaluator.py"]
//
// Every subcommand also accepts --config <file> (TOML/INI); flags override it.

#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "agto/errors.hpp"
#include "agto/harness.hpp"

namespace {

using namespace agto;

// "F1..F5", "F1,F3,F9", "all" or "list" (prints the suite and exits).
std::vector<bench::FunctionId> parse_functions(const std::string& spec) {
  if (spec.empty() || spec == "all")
    return harness::ExperimentConfig::all_functions();
  std::vector<bench::FunctionId> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const int lo = static_cast<int>(bench::parse_id(item.substr(0, dots)));
      const int hi = static_cast<int>(bench::parse_id(item.substr(dots + 2)));
      if (lo > hi)
        throw LookupError("empty function range '" + item + "'");
      for (int k = lo; k <= hi; ++k)
        out.push_back(static_cast<bench::FunctionId>(k));
    } else if (!item.empty()) {
      out.push_back(bench::parse_id(item));
    }
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

void print_suite() {
  for (const auto& d : bench::suite())
    std::cout << bench::to_string(d.id) << "  " << d.name << "  [" << d.lower << ", " << d.upper << "]^" << d.dims
              << "  optimum " << d.global_optimum << "  " << bench::to_string(d.category) << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amended gorilla troop optimizer toolkit"};
  app.set_config("--config", "", "Configuration file mirroring the command-line flags");
  app.require_subcommand(1);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark campaign");
  std::string functions = "all";
  std::vector<std::string> algos{"agto", "gto"};
  harness::ExperimentConfig exp;
  std::string bench_out;
  bool no_obl = false, no_qrg = false;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  bench_cmd->add_option("--functions", functions, "F1..F23, a comma list, 'all' or 'list'");
  bench_cmd->add_option("--algo", algos, "Algorithms (agto, gto)")->delimiter(',');
  bench_cmd->add_option("--runs", exp.runs, "Independent runs per cell")->capture_default_str();
  bench_cmd->add_option("--pop", exp.pop_size, "Population size")->capture_default_str();
  bench_cmd->add_option("--max-evals", exp.max_evals, "Objective evaluations per run")->capture_default_str();
  bench_cmd->add_option("--seed", exp.base_seed, "Base seed")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Output directory");
  bench_cmd->add_option("--workers", workers, "Worker threads")->capture_default_str();
  bench_cmd->add_flag("--no-obl", no_obl, "Disable opposition-based initialization for agto");
  bench_cmd->add_flag("--no-qrg", no_qrg, "Disable quantum rotation mutation for agto");

  // report
  auto* report_cmd = app.add_subcommand("report", "Recompute statistics of a finished campaign");
  std::string report_in;
  report_cmd->add_option("--in", report_in, "Campaign directory")->required();

  // hpo
  auto* hpo_cmd = app.add_subcommand("hpo", "Hyperparameter search over the network training space");
  harness::HpoSessionConfig hcfg;
  std::string evaluator_cmd, hpo_out;
  double timeout_s = 300.0;
  hpo_cmd->add_option("--evaluator-cmd", evaluator_cmd, "Evaluator command; built-in surrogate when omitted");
  hpo_cmd->add_option("--budget", hcfg.budget, "Optimizer evaluations")->capture_default_str();
  hpo_cmd->add_option("--pop", hcfg.pop_size, "Population size")->capture_default_str();
  hpo_cmd->add_option("--seed", hcfg.seed, "Seed")->capture_default_str();
  hpo_cmd->add_option("--timeout", timeout_s, "Per-trial timeout in seconds")->capture_default_str();
  hpo_cmd->add_option("--out", hpo_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench_cmd) {
      if (functions == "list") {
        print_suite();
        return 0;
      }
      if (bench_out.empty())
        throw CLI::RequiredError("--out");
      exp.functions = parse_functions(functions);
      exp.algorithms.clear();
      for (const auto& a : algos)
        exp.algorithms.push_back(harness::parse_algorithm(a));
      exp.output_dir = bench_out;
      exp.enable_obl = !no_obl;
      exp.enable_qrg = !no_qrg;
      exp.workers = workers;
      const auto summary = harness::run_campaign(exp, &std::cerr);
      harness::print_report(std::cout, summary.report);
    } else if (*report_cmd) {
      harness::print_report(std::cout, harness::report_from_directory(report_in));
    } else if (*hpo_cmd) {
      if (!evaluator_cmd.empty())
        hcfg.evaluator_cmd = evaluator_cmd;
      hcfg.output_dir = hpo_out;
      hcfg.timeout = std::chrono::duration<double>(timeout_s);
      harness::run_hpo_session(hcfg, &std::cout);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
