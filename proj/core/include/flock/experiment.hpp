#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flock/bounds.hpp"
#include "flock/grid.hpp"
#include "flock/kernels.hpp"
#include "flock/solver.hpp"

namespace flock {

inline constexpr int kSchemaVersion = 1;

struct VelocitySpec {
  enum class Kind { ZeroE, QProfile, Profile };
  Kind kind = Kind::ZeroE;
  double u_mean = 0.0;
  double q_amp = 0.0;  // QProfile: q0 = q_amp * sin(q_mode x), mean-adjusted
  int q_mode = 1;
  std::vector<double> cosine_coeffs;  // Profile: u = u_mean + sum c_k cos(kx) + s_k sin(kx)
  std::vector<double> sine_coeffs;
};

struct InitialSpec {
  DensitySpec density;
  std::optional<std::string> density_csv;  // raw CSV path overrides density.kind
  VelocitySpec velocity;
};

struct ExperimentConfig {
  int n_cells = 256;
  KernelSpec kernel;
  InitialSpec initial;
  SolverConfig solver;
  std::string csv_path = "timeseries.csv";
  std::string report_path = "report.json";
  std::uint64_t seed = 0;

  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
};

struct PreparedExperiment {
  GridPtr grid;
  FlockState initial;
  BoundReport report;
};

/// Builds the grid and initial data and evaluates all bounds; throws
/// ConfigError / SmallnessViolation on invalid or over-threshold configs.
PreparedExperiment prepare(const ExperimentConfig& config);

// Exit codes of run_experiment.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;
inline constexpr int kExitBoundFailure = 4;

struct ExperimentResult {
  int exit_code = kExitOk;
  std::string message;
  Trajectory trajectory;
  BoundReport report;
  CheckSummary summary;
};

/// Runs a prepared config end to end and writes the CSV time series and the
/// JSON report (BoundReport + CheckSummary).
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Convenience: parse, prepare, run.  Config errors map to exit code 2.
int run_experiment_file(const std::string& config_path, const std::string& out_dir,
                        std::optional<std::uint64_t> seed_override);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  double theoretical_bound = 0.0;
  double observed_tail_l1 = 0.0;
  double margin = 0.0;
  std::string error;
};

/// Runs the base config once per parameter value.  Per-row failures are
/// recorded and the sweep continues.  parameter is one of
/// {q0_scale, lambda, m0, alpha, tau, n_cells}.
std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::string& parameter,
                            const std::vector<double>& values, const std::string& out_dir);

// Serialization helpers (schema_version carried on every JSON document).
std::string bound_report_json(const BoundReport& report);
std::string check_summary_json(const CheckSummary& summary);
void write_timeseries_csv(const std::string& path, const Trajectory& traj);
void write_sweep_csv(const std::string& path, const std::string& parameter,
                     const std::vector<SweepRow>& rows);

/// Formats with 17 significant digits, "." decimal separator.
std::string format_double(double v);

}  // namespace flock
