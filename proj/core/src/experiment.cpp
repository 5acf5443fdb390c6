#include "flock/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flock/diagnostics.hpp"
#include "flock/errors.hpp"
#include "json.hpp"

namespace flock {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double req_number(const json& j, const std::string& ctx, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(ctx + ": missing required field \"" + key + "\"");
  if (!j[key].is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

double opt_number(const json& j, const std::string& ctx, const std::string& key, double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

std::string opt_string(const json& j, const std::string& ctx, const std::string& key,
                       const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) throw ConfigError(ctx + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

KernelSpec parse_kernel(const json& j) {
  if (!j.is_object()) throw ConfigError("kernel: expected an object");
  KernelSpec k;
  std::string variant = opt_string(j, "kernel", "variant", "lipschitz");
  if (variant == "lipschitz")
    k.variant = KernelVariant::Lipschitz;
  else if (variant == "geometric")
    k.variant = KernelVariant::Geometric;
  else if (variant == "topological")
    k.variant = KernelVariant::Topological;
  else
    throw ConfigError("kernel.variant: unknown variant \"" + variant +
                      "\" (expected lipschitz, geometric, or topological)");
  k.lambda = opt_number(j, "kernel", "lambda", 1.0);
  k.r0 = opt_number(j, "kernel", "r0", 1.0);
  if (k.variant != KernelVariant::Lipschitz) k.alpha = req_number(j, "kernel", "alpha");
  if (k.variant == KernelVariant::Topological) k.tau = req_number(j, "kernel", "tau");
  return k;
}

InitialSpec parse_initial(const json& j) {
  if (!j.is_object()) throw ConfigError("initial: expected an object");
  InitialSpec init;
  if (j.contains("density")) {
    const json& d = j["density"];
    std::string kind = opt_string(d, "initial.density", "kind", "uniform");
    if (kind == "uniform")
      init.density.kind = DensitySpec::Kind::Uniform;
    else if (kind == "cosine")
      init.density.kind = DensitySpec::Kind::CosineBump;
    else if (kind == "gaussian")
      init.density.kind = DensitySpec::Kind::GaussianBump;
    else
      throw ConfigError("initial.density.kind: unknown kind \"" + kind + "\"");
    init.density.mass = opt_number(d, "initial.density", "mass", init.density.mass);
    init.density.amplitude = opt_number(d, "initial.density", "amplitude", 0.0);
    init.density.mode = static_cast<int>(opt_number(d, "initial.density", "mode", 1));
    init.density.width = opt_number(d, "initial.density", "width", 0.5);
  }
  if (j.contains("density_csv"))
    init.density_csv = opt_string(j, "initial", "density_csv", "");
  if (j.contains("velocity")) {
    const json& v = j["velocity"];
    std::string kind = opt_string(v, "initial.velocity", "kind", "zero_e");
    if (kind == "zero_e")
      init.velocity.kind = VelocitySpec::Kind::ZeroE;
    else if (kind == "q_profile")
      init.velocity.kind = VelocitySpec::Kind::QProfile;
    else if (kind == "profile")
      init.velocity.kind = VelocitySpec::Kind::Profile;
    else
      throw ConfigError("initial.velocity.kind: unknown kind \"" + kind + "\"");
    init.velocity.u_mean = opt_number(v, "initial.velocity", "u_mean", 0.0);
    init.velocity.q_amp = opt_number(v, "initial.velocity", "q_amp", 0.0);
    init.velocity.q_mode = static_cast<int>(opt_number(v, "initial.velocity", "q_mode", 1));
    for (const char* key : {"cosine_coeffs", "sine_coeffs"}) {
      if (!v.contains(key)) continue;
      if (!v[key].is_array())
        throw ConfigError(std::string("initial.velocity.") + key + ": expected an array");
      auto& dst = std::string(key) == "cosine_coeffs" ? init.velocity.cosine_coeffs
                                                      : init.velocity.sine_coeffs;
      for (const auto& x : v[key]) {
        if (!x.is_number())
          throw ConfigError(std::string("initial.velocity.") + key + ": expected numbers");
        dst.push_back(x.get<double>());
      }
    }
  }
  return init;
}

json kernel_json(const KernelSpec& k) {
  json j{{"variant", to_string(k.variant)}, {"lambda", k.lambda}, {"r0", k.r0}};
  if (k.singular()) {
    j["alpha"] = k.alpha;
    if (k.variant == KernelVariant::Topological) j["tau"] = k.tau;
  }
  return j;
}

json smallness_json(const SmallnessStatus& s) {
  return json{{"required", s.required},
              {"threshold", s.threshold},
              {"value", s.value},
              {"satisfied", s.satisfied},
              {"margin", s.margin},
              {"relaxed_threshold", s.relaxed_threshold},
              {"relaxed_satisfied", s.relaxed_satisfied}};
}

json report_json_obj(const BoundReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kernel"] = kernel_json(r.kernel);
  j["m0"] = r.m0;
  j["rho0_sup"] = r.rho0_sup;
  j["sup_q0"] = r.sup_q0;
  j["inf_q0"] = r.inf_q0;
  j["e0_zero"] = r.e0_zero;
  j["smallness"] = smallness_json(r.smallness);
  j["amplitude_case"] = to_string(r.amp_case);
  j["theorem1_rate"] = r.theorem1_rate_value;
  j["theorem2_l1_bound"] = r.theorem2_l1_bound ? json(*r.theorem2_l1_bound) : json(nullptr);
  j["theorem3_l1_bound"] = r.theorem3_l1_bound ? json(*r.theorem3_l1_bound) : json(nullptr);
  j["density_amp_bound"] = r.density_amp_bound;
  j["optimal_r"] = r.optimal_r ? json(*r.optimal_r) : json(nullptr);
  j["logistic"] = json{{"rate_factor", r.logistic.rate_factor},
                       {"carrying_capacity", r.logistic.carrying_capacity},
                       {"x0", r.logistic.x0}};
  j["poincare"] = json{{"r0", r.poincare.r0},
                       {"epsilon", r.poincare.epsilon},
                       {"c_paper", r.poincare.c_paper},
                       {"c_rigorous", r.poincare.c_rigorous}};
  if (r.norms)
    j["kernel_norms"] = json{{"l1", r.norms->l1_norm}, {"linf", r.norms->linf_norm}};
  return j;
}

json summary_json_obj(const CheckSummary& s) {
  json checks = json::array();
  for (const auto& c : s.checks)
    checks.push_back(json{{"name", c.name},
                          {"pass", c.pass},
                          {"observed", c.observed},
                          {"bound", c.bound},
                          {"detail", c.detail}});
  return json{{"schema_version", kSchemaVersion}, {"all_pass", s.all_pass()}, {"checks", checks}};
}

void write_report_file(const std::string& path, const BoundReport& report,
                       const CheckSummary& summary, const std::string& error) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["bound_report"] = report_json_obj(report);
  j["check_summary"] = summary_json_obj(summary);
  j["error"] = error.empty() ? json(nullptr) : json(error);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

double tail_max_l1(const Trajectory& traj, double tail_fraction = 0.25) {
  if (traj.snapshots.empty()) return 0.0;
  double t_tail = traj.snapshots.back().diag.time * (1.0 - tail_fraction);
  double m = 0.0;
  for (const auto& s : traj.snapshots)
    if (s.diag.time >= t_tail) m = std::max(m, s.diag.l1_dev);
  return m;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top-level JSON must be an object");
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
    throw ConfigError("config.schema_version: expected " + std::to_string(kSchemaVersion));

  ExperimentConfig cfg;
  cfg.n_cells = static_cast<int>(opt_number(j, "config", "n_cells", cfg.n_cells));
  if (j.contains("kernel")) cfg.kernel = parse_kernel(j["kernel"]);
  if (j.contains("initial")) cfg.initial = parse_initial(j["initial"]);
  if (j.contains("solver")) {
    const json& s = j["solver"];
    cfg.solver.cfl = opt_number(s, "solver", "cfl", cfg.solver.cfl);
    cfg.solver.t_end = req_number(s, "solver", "t_end");
    cfg.solver.record_every = opt_number(s, "solver", "record_every", cfg.solver.record_every);
    cfg.solver.max_steps =
        static_cast<long>(opt_number(s, "solver", "max_steps", cfg.solver.max_steps));
    cfg.solver.positivity_floor =
        opt_number(s, "solver", "positivity_floor", cfg.solver.positivity_floor);
  } else {
    throw ConfigError("config: missing required section \"solver\"");
  }
  if (j.contains("output")) {
    cfg.csv_path = opt_string(j["output"], "output", "csv", cfg.csv_path);
    cfg.report_path = opt_string(j["output"], "output", "report", cfg.report_path);
  }
  cfg.seed = static_cast<std::uint64_t>(opt_number(j, "config", "seed", 0));
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

PreparedExperiment prepare(const ExperimentConfig& config) {
  PreparedExperiment prep;
  try {
    config.kernel.validate();
    config.solver.validate();
    prep.grid = TorusGrid::make(config.n_cells);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  Field rho0 = config.initial.density_csv
                   ? load_density_csv(*config.initial.density_csv, prep.grid,
                                      config.initial.density.mass)
                   : make_initial_density(config.initial.density, prep.grid);

  const VelocitySpec& vs = config.initial.velocity;
  Field u;
  switch (vs.kind) {
    case VelocitySpec::Kind::ZeroE:
      u = make_zero_e_velocity(rho0, config.kernel, vs.u_mean);
      break;
    case VelocitySpec::Kind::QProfile: {
      Field q0(prep.grid);
      for (int i = 0; i < q0.size(); ++i)
        q0[i] = vs.q_amp * std::sin(vs.q_mode * prep.grid->center(i));
      u = make_velocity_with_q(rho0, config.kernel, q0, vs.u_mean);
      break;
    }
    case VelocitySpec::Kind::Profile: {
      u = Field(prep.grid, vs.u_mean);
      for (int i = 0; i < u.size(); ++i) {
        double x = prep.grid->center(i);
        for (std::size_t k = 0; k < vs.cosine_coeffs.size(); ++k)
          u[i] += vs.cosine_coeffs[k] * std::cos((k + 1.0) * x);
        for (std::size_t k = 0; k < vs.sine_coeffs.size(); ++k)
          u[i] += vs.sine_coeffs[k] * std::sin((k + 1.0) * x);
      }
      break;
    }
  }

  prep.initial = FlockState{rho0, u, 0.0};
  Field q = compute_q(prep.initial, config.kernel);
  bool e0_zero = vs.kind == VelocitySpec::Kind::ZeroE;
  prep.report = make_bound_report(config.kernel, integrate(rho0), rho0.max(), q.max_abs(),
                                  q.min(), e0_zero);
  return prep;
}

void write_timeseries_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write CSV: " + path);
  out << "t,mass,momentum,entropy,l1_dev,l2_dev_sq,sup_rho,sup_q,e_integral,dissipation,"
         "entropy_residual\n";
  for (const auto& s : traj.snapshots) {
    const auto& d = s.diag;
    out << format_double(d.time) << ',' << format_double(d.mass) << ','
        << format_double(d.momentum) << ',' << format_double(d.entropy) << ','
        << format_double(d.l1_dev) << ',' << format_double(d.l2_dev_sq) << ','
        << format_double(d.sup_rho) << ',' << format_double(d.sup_q) << ','
        << format_double(d.e_integral) << ',' << format_double(d.dissipation) << ','
        << format_double(d.entropy_residual) << '\n';
  }
  if (traj.aborted()) out << "aborted," << csv_quote(traj.error) << ",,,,,,,,,\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  ExperimentResult res;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  PreparedExperiment prep;
  try {
    prep = prepare(config);
  } catch (const FlockError& e) {
    res.exit_code = kExitConfigError;
    res.message = e.what();
    return res;
  }
  res.report = prep.report;

  res.trajectory = run(prep.initial, config.kernel, config.solver);
  const std::string csv_path = (fs::path(out_dir) / config.csv_path).string();
  const std::string report_path = (fs::path(out_dir) / config.report_path).string();
  write_timeseries_csv(csv_path, res.trajectory);

  if (res.trajectory.aborted()) {
    res.exit_code = kExitSolverError;
    res.message = res.trajectory.error;
    write_report_file(report_path, res.report, res.summary, res.message);
    return res;
  }

  try {
    for (const auto& s : res.trajectory.snapshots) validate_record(s.diag);
    res.summary = check_trajectory(res.trajectory, res.report);
  } catch (const InsufficientTailError& e) {
    res.exit_code = kExitConfigError;
    res.message = e.what();
    write_report_file(report_path, res.report, res.summary, res.message);
    return res;
  } catch (const FlockError& e) {
    res.exit_code = kExitSolverError;
    res.message = e.what();
    write_report_file(report_path, res.report, res.summary, res.message);
    return res;
  }

  write_report_file(report_path, res.report, res.summary, "");
  if (!res.summary.all_pass()) {
    res.exit_code = kExitBoundFailure;
    res.message = "one or more bound checks failed";
  }
  return res;
}

int run_experiment_file(const std::string& config_path, const std::string& out_dir,
                        std::optional<std::uint64_t> seed_override) {
  ExperimentConfig config;
  try {
    config = ExperimentConfig::from_json_file(config_path);
  } catch (const FlockError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (seed_override) config.seed = *seed_override;
  ExperimentResult res = run_experiment(config, out_dir);
  if (!res.message.empty()) std::cerr << res.message << "\n";
  return res.exit_code;
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::string& parameter,
                            const std::vector<double>& values, const std::string& out_dir) {
  std::vector<SweepRow> rows;
  int index = 0;
  for (double v : values) {
    ExperimentConfig cfg = base;
    if (parameter == "q0_scale")
      cfg.initial.velocity.q_amp = base.initial.velocity.q_amp * v;
    else if (parameter == "lambda")
      cfg.kernel.lambda = v;
    else if (parameter == "m0")
      cfg.initial.density.mass = v;
    else if (parameter == "alpha")
      cfg.kernel.alpha = v;
    else if (parameter == "tau")
      cfg.kernel.tau = v;
    else if (parameter == "n_cells")
      cfg.n_cells = static_cast<int>(std::lround(v));
    else
      throw ConfigError("sweep: unknown parameter \"" + parameter +
                        "\" (expected q0_scale, lambda, m0, alpha, tau, or n_cells)");

    SweepRow row;
    row.value = v;
    std::ostringstream sub;
    sub << parameter << "_" << index++;
    ExperimentResult res = run_experiment(cfg, (fs::path(out_dir) / sub.str()).string());
    if (res.exit_code == kExitConfigError || res.exit_code == kExitSolverError) {
      row.ok = false;
      row.error = res.message;
    } else {
      row.ok = res.exit_code == kExitOk;
      row.error = res.message;
      row.theoretical_bound = res.report.theorem2_l1_bound   ? *res.report.theorem2_l1_bound
                              : res.report.theorem3_l1_bound ? *res.report.theorem3_l1_bound
                                                             : 0.0;
      row.observed_tail_l1 = tail_max_l1(res.trajectory);
      row.margin = row.theoretical_bound - row.observed_tail_l1;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::string& parameter,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write sweep CSV: " + path);
  out << parameter << ",ok,theoretical_bound,observed_tail_l1,margin,error\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << ',' << (r.ok ? "true" : "false") << ','
        << format_double(r.theoretical_bound) << ',' << format_double(r.observed_tail_l1) << ','
        << format_double(r.margin) << ',' << csv_quote(r.error) << '\n';
  }
}

std::string bound_report_json(const BoundReport& report) { return report_json_obj(report).dump(2); }

std::string check_summary_json(const CheckSummary& summary) {
  return summary_json_obj(summary).dump(2);
}

}  // namespace flock
