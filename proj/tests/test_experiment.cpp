#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "flock/errors.hpp"
#include "flock/experiment.hpp"

using namespace flock;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* kBaseConfig = R"({
  "schema_version": 1,
  "n_cells": 64,
  "kernel": {"variant": "lipschitz", "lambda": 1.0, "r0": 1.0},
  "initial": {
    "density": {"kind": "cosine", "mass": 6.283185307179586, "amplitude": 0.5},
    "velocity": {"kind": "zero_e"}
  },
  "solver": {"t_end": 40.0, "record_every": 0.5}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("flock_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing: defaults, requirements, and errors") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  CHECK(cfg.n_cells == 64);
  CHECK(cfg.kernel.variant == KernelVariant::Lipschitz);
  CHECK(cfg.initial.density.amplitude == 0.5);
  CHECK(cfg.solver.t_end == 40.0);
  CHECK(cfg.solver.record_every == 0.5);
  CHECK(cfg.solver.cfl == 0.4);  // default
  CHECK(cfg.csv_path == "timeseries.csv");

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"schema_version\": 2, \"solver\": {\"t_end\": 1}}"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{}"), ConfigError);  // missing solver
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                      R"({"kernel": {"variant": "geometric"}, "solver": {"t_end": 1}})"),
                  ConfigError);  // alpha required
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                      R"({"kernel": {"variant": "nope"}, "solver": {"t_end": 1}})"),
                  ConfigError);
}

TEST_CASE("prepare builds initial data and the bound report") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  PreparedExperiment prep = prepare(cfg);
  CHECK(prep.grid->n_cells() == 64);
  CHECK(integrate(prep.initial.rho) == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(prep.report.e0_zero);
  CHECK(prep.report.sup_q0 < 1e-8);
  CHECK(prep.report.rho0_sup == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("prepare rejects over-threshold smallness at config time") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  cfg.kernel.variant = KernelVariant::Topological;
  cfg.kernel.alpha = 0.5;
  cfg.kernel.tau = 1.6;
  cfg.initial.velocity.kind = VelocitySpec::Kind::QProfile;
  cfg.initial.velocity.q_amp = 0.1;  // threshold is ~0.048
  CHECK_THROWS_AS(prepare(cfg), SmallnessViolation);
}

TEST_CASE("format_double round-trips 17 significant digits") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.10000000000000001");
  double v = 0.12345678901234567;
  CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(v).find(',') == std::string::npos);
}

TEST_CASE("run_experiment writes CSV with the contracted header and a report") {
  TempDir dir("run");
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  ExperimentResult res = run_experiment(cfg, dir.path.string());
  CHECK(res.exit_code == kExitOk);

  std::string csv = slurp(dir.path / "timeseries.csv");
  CHECK(csv.rfind("t,mass,momentum,entropy,l1_dev,l2_dev_sq,sup_rho,sup_q,e_integral,"
                  "dissipation,entropy_residual\n",
                  0) == 0);
  // 81 records (t = 0..40 every 0.5) + header.
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 82);

  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("\"schema_version\": 1") != std::string::npos);
  CHECK(report.find("\"bound_report\"") != std::string::npos);
  CHECK(report.find("\"check_summary\"") != std::string::npos);
}

TEST_CASE("runs are deterministic: byte-identical CSV and report") {
  TempDir a("det_a"), b("det_b");
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  run_experiment(cfg, a.path.string());
  run_experiment(cfg, b.path.string());
  CHECK(slurp(a.path / "timeseries.csv") == slurp(b.path / "timeseries.csv"));
  CHECK(slurp(a.path / "report.json") == slurp(b.path / "report.json"));
}

TEST_CASE("run_experiment_file maps config problems to exit code 2") {
  TempDir dir("exit2");
  fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{\"solver\": {}}";
  CHECK(run_experiment_file(bad.string(), dir.path.string(), std::nullopt) == kExitConfigError);
  CHECK(run_experiment_file((dir.path / "missing.json").string(), dir.path.string(),
                            std::nullopt) == kExitConfigError);
}

TEST_CASE("sweep runs one row per value and flags per-row failures") {
  TempDir dir("sweep");
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  cfg.kernel.variant = KernelVariant::Topological;
  cfg.kernel.alpha = 0.5;
  cfg.kernel.tau = 1.6;
  cfg.initial.velocity.kind = VelocitySpec::Kind::QProfile;
  cfg.initial.velocity.q_amp = 0.02;

  // Scale q0 across the smallness threshold: last value must fail cleanly.
  std::vector<SweepRow> rows = sweep(cfg, "q0_scale", {0.5, 1.0, 4.0}, dir.path.string());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ok);
  CHECK(rows[1].ok);
  CHECK(!rows[2].ok);
  CHECK(!rows[2].error.empty());
  CHECK(rows[0].theoretical_bound > 0.0);
  CHECK(rows[0].observed_tail_l1 >= 0.0);

  fs::path table = dir.path / "sweep.csv";
  write_sweep_csv(table.string(), "q0_scale", rows);
  std::string csv = slurp(table);
  CHECK(csv.rfind("q0_scale,", 0) == 0);

  CHECK_THROWS_AS(sweep(cfg, "nonsense", {1.0}, dir.path.string()), ConfigError);
}

TEST_CASE("aborted runs leave a marker row and exit code 3") {
  TempDir dir("abort");
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  cfg.solver.t_end = 50.0;
  cfg.solver.max_steps = 3;
  ExperimentResult res = run_experiment(cfg, dir.path.string());
  CHECK(res.exit_code == kExitSolverError);
  std::string csv = slurp(dir.path / "timeseries.csv");
  CHECK(csv.find("aborted") != std::string::npos);
  std::string report = slurp(dir.path / "report.json");
  CHECK(report.find("max_steps") != std::string::npos);
}

TEST_CASE("bound_report and check_summary serialize with schema_version") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kBaseConfig);
  PreparedExperiment prep = prepare(cfg);
  std::string j = bound_report_json(prep.report);
  CHECK(j.find("\"schema_version\": 1") != std::string::npos);
  CHECK(j.find("\"amplitude_case\": \"lipschitz\"") != std::string::npos);
  CHECK(j.find("\"kernel_norms\"") != std::string::npos);

  CheckSummary summary;
  summary.checks.push_back({"demo", true, 1.0, 2.0, "ok"});
  std::string sj = check_summary_json(summary);
  CHECK(sj.find("\"all_pass\": true") != std::string::npos);
  CHECK(sj.find("\"demo\"") != std::string::npos);
}
