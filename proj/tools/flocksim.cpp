// flocksim: batch experiment runner for the torus alignment solver.
//   simulate <config.json>            run one experiment, write CSV + report
//   sweep <config.json> --param ...   rerun across parameter values
//   acceptance <suite|all>            run the pinned acceptance bundles

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flock/acceptance.hpp"
#include "flock/errors.hpp"
#include "flock/experiment.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw flock::ConfigError("--values: not a number: " + item);
    }
  }
  if (out.empty()) throw flock::ConfigError("--values: empty list");
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values_csv, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
  flock::ExperimentConfig base = flock::ExperimentConfig::from_json_file(config_path);
  if (seed) base.seed = *seed;
  std::vector<double> values = parse_values(values_csv);
  fs::create_directories(out_dir);
  auto rows = flock::sweep(base, param, values, out_dir);
  const std::string table = (fs::path(out_dir) / "sweep.csv").string();
  flock::write_sweep_csv(table, param, rows);
  std::cout << "wrote " << table << "\n";
  for (const auto& r : rows) {
    std::cout << param << " = " << flock::format_double(r.value) << ": "
              << (r.ok ? "ok" : "failed") << ", bound " << flock::format_double(r.theoretical_bound)
              << ", tail l1 " << flock::format_double(r.observed_tail_l1);
    if (!r.error.empty()) std::cout << " (" << r.error << ")";
    std::cout << "\n";
  }
  return 0;
}

int cmd_acceptance(const std::string& suite, const std::string& out_dir, std::uint64_t seed) {
  flock::AcceptanceRunner runner(seed);
  std::vector<std::string> suites;
  if (suite == "all")
    suites = flock::AcceptanceRunner::suite_names();
  else
    suites.push_back(suite);

  std::vector<flock::AcceptanceReport> reports;
  bool all_pass = true;
  for (const auto& s : suites) {
    flock::AcceptanceReport rep = runner.run_suite(s);
    for (const auto& c : rep.checks)
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << rep.suite << "/" << c.name << " - "
                << c.detail << "\n";
    all_pass = all_pass && rep.all_pass();
    reports.push_back(std::move(rep));
  }
  fs::create_directories(out_dir);
  const std::string json_path = (fs::path(out_dir) / "acceptance.json").string();
  std::ofstream out(json_path);
  out << runner.report_json(reports) << "\n";
  std::cout << "wrote " << json_path << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torus alignment solver: experiments, sweeps, acceptance suites"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  app.add_option("--out-dir", out_dir, "output directory (default: out)");
  app.add_option("--seed", seed, "seed for randomized property suites");

  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "run one experiment from a JSON config");
  sim->add_option("config", sim_config, "config JSON path")->required();

  std::string sweep_config, sweep_param, sweep_values;
  auto* sw = app.add_subcommand("sweep", "rerun a base config across parameter values");
  sw->add_option("config", sweep_config, "base config JSON path")->required();
  sw->add_option("--param", sweep_param,
                 "parameter: q0_scale, lambda, m0, alpha, tau, n_cells")
      ->required();
  sw->add_option("--values", sweep_values, "comma-separated values")->required();

  std::string suite;
  auto* acc = app.add_subcommand("acceptance", "run an acceptance suite");
  acc->add_option("suite", suite,
                  "conservation, inequalities, oracles, theorem1, theorem2, theorem3, "
                  "envelopes, or all")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return flock::run_experiment_file(sim_config, out_dir, seed);
    if (sw->parsed()) return cmd_sweep(sweep_config, sweep_param, sweep_values, out_dir, seed);
    if (acc->parsed()) return cmd_acceptance(suite, out_dir, seed.value_or(0));
  } catch (const flock::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return flock::kExitConfigError;
  } catch (const flock::FlockError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return flock::kExitSolverError;
  }
  return 0;
}
