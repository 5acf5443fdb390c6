#include "flock/acceptance.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "flock/diagnostics.hpp"
#include "flock/errors.hpp"
#include "json.hpp"

namespace flock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct RunSpec {
  KernelSpec kernel;
  double q_amp = 0.0;  // 0 => zero-e initial velocity
  double t_end = 50.0;
  double record_every = 0.5;
  int n_cells = 256;
  bool uniform = false;  // uniform density instead of 1 + 0.5 cos x
};

ExperimentConfig to_config(const RunSpec& r) {
  ExperimentConfig cfg;
  cfg.n_cells = r.n_cells;
  cfg.kernel = r.kernel;
  cfg.initial.density.kind =
      r.uniform ? DensitySpec::Kind::Uniform : DensitySpec::Kind::CosineBump;
  cfg.initial.density.mass = kTwoPi;
  cfg.initial.density.amplitude = r.uniform ? 0.0 : 0.5;
  cfg.initial.velocity.kind =
      r.q_amp == 0.0 ? VelocitySpec::Kind::ZeroE : VelocitySpec::Kind::QProfile;
  cfg.initial.velocity.q_amp = r.q_amp;
  cfg.solver.t_end = r.t_end;
  cfg.solver.record_every = r.record_every;
  return cfg;
}

KernelSpec lip_kernel() {
  KernelSpec k;
  k.variant = KernelVariant::Lipschitz;
  k.lambda = 1.0;
  k.r0 = 1.0;
  return k;
}

KernelSpec geo_kernel(double alpha) {
  KernelSpec k;
  k.variant = KernelVariant::Geometric;
  k.lambda = 1.0;
  k.r0 = 1.0;
  k.alpha = alpha;
  return k;
}

KernelSpec topo_kernel(double alpha, double tau) {
  KernelSpec k;
  k.variant = KernelVariant::Topological;
  k.lambda = 1.0;
  k.r0 = 1.0;
  k.alpha = alpha;
  k.tau = tau;
  return k;
}

// The pinned acceptance runs (mirrored by the JSON files under configs/).
std::map<std::string, RunSpec> run_table() {
  std::map<std::string, RunSpec> t;
  t["equilibrium"] = {lip_kernel(), 0.0, 50.0, 0.5, 256, true};
  t["thm1_lip"] = {lip_kernel(), 0.0, 60.0, 0.25, 256, false};
  t["thm1_topo"] = {topo_kernel(0.5, 0.5), 0.0, 14.0, 0.1, 256, false};
  t["thm2_lip"] = {lip_kernel(), 0.15, 200.0, 0.5, 256, false};
  t["thm2_lip_n64"] = {lip_kernel(), 0.15, 200.0, 0.5, 64, false};
  t["thm2_lip_n128"] = {lip_kernel(), 0.15, 200.0, 0.5, 128, false};
  t["thm3_geo"] = {geo_kernel(0.5), 0.1, 40.0, 0.25, 256, false};
  t["thm3_tau_eq"] = {topo_kernel(0.5, 0.5), 0.1, 30.0, 0.2, 256, false};
  t["thm3_between"] = {topo_kernel(0.5, 0.8), 0.383, 30.0, 0.2, 256, false};
  t["thm3_above"] = {topo_kernel(0.5, 1.6), 0.024, 30.0, 0.2, 256, false};
  t["entropy_n64"] = {lip_kernel(), 0.0, 20.0, 0.1, 64, false};
  t["entropy_n128"] = {lip_kernel(), 0.0, 20.0, 0.1, 128, false};
  t["entropy_n256"] = {lip_kernel(), 0.0, 20.0, 0.1, 256, false};
  return t;
}

struct RunData {
  Trajectory traj;
  BoundReport report;
  FlockState initial;
  KernelSpec kernel;
};

double tail_start(const Trajectory& traj) {
  return traj.snapshots.back().diag.time * 0.75;
}

double tail_max(const Trajectory& traj, double (*sel)(const DiagnosticsRecord&)) {
  double t0 = tail_start(traj);
  double m = 0.0;
  for (const auto& s : traj.snapshots)
    if (s.diag.time >= t0) m = std::max(m, sel(s.diag));
  return m;
}

Field random_density(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  const int modes = 4;
  double a[modes], b[modes], s = 0.0;
  for (int k = 0; k < modes; ++k) {
    a[k] = unit(rng);
    b[k] = unit(rng);
    s += std::abs(a[k]) + std::abs(b[k]);
  }
  double amp = 0.85 * pos(rng) / std::max(s, 1e-12);
  double mass_scale = 0.5 + 1.5 * pos(rng);
  Field rho(grid);
  for (int i = 0; i < rho.size(); ++i) {
    double x = grid->center(i), v = 1.0;
    for (int k = 0; k < modes; ++k)
      v += amp * (a[k] * std::cos((k + 1.0) * x) + b[k] * std::sin((k + 1.0) * x));
    rho[i] = mass_scale * v;
  }
  return rho;
}

/// (1/2) * sum over pairs with geodesic separation < r0 of (rho_i - rho_j)^2,
/// restricted to cells fully inside the ball (a conservative lower cut).
double local_pair_energy(const Field& rho, double r0) {
  const auto& g = rho.grid();
  const int n = g.n_cells(), half = n / 2;
  const double h = g.dx();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k <= half; ++k) {
      if (k * h + 0.5 * h > r0) break;
      double d = rho[g.wrap(i + k)] - rho[i];
      s += (k == half ? 0.5 : 1.0) * d * d;
    }
  }
  return s * h * h;
}

}  // namespace

double oracle_lpsi_singular(const std::function<double(double)>& f,
                            const std::function<double(double)>& f_second, double x,
                            double lambda, double r0, double alpha, double rho_uniform,
                            double tau, int n_cells, int refine) {
  const double h_f = kTwoPi / (static_cast<double>(n_cells) * refine);
  const double coeff = lambda * std::pow(rho_uniform, -tau);
  double acc = 0.0;
  // fine midpoint cells [m h_f, (m+1) h_f], m >= 1, clipped at r0
  for (long m = 1; m * h_f < r0; ++m) {
    double lo = m * h_f;
    double hi = std::min((m + 1.0) * h_f, r0);
    double z = 0.5 * (lo + hi), w = hi - lo;
    double psi = coeff * std::pow(z, -1.0 - alpha);
    acc += w * psi * ((f(x + z) - f(x)) + (f(x - z) - f(x)));
  }
  // sliver |z| < h_f by second-order Taylor: int_0^delta psi z^2 f''(x) dz
  acc += f_second(x) * coeff * std::pow(h_f, 2.0 - alpha) / (2.0 - alpha);
  return acc;
}

bool AcceptanceReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

struct AcceptanceRunner::Impl {
  std::uint64_t seed;
  std::map<std::string, RunData> runs;

  explicit Impl(std::uint64_t s) : seed(s) {}

  const RunData& get_run(const std::string& name) {
    auto it = runs.find(name);
    if (it != runs.end()) return it->second;
    auto table = run_table();
    auto spec_it = table.find(name);
    if (spec_it == table.end()) throw ConfigError("unknown acceptance run: " + name);
    ExperimentConfig cfg = to_config(spec_it->second);
    PreparedExperiment prep = prepare(cfg);
    RunData data;
    data.initial = prep.initial;
    data.kernel = cfg.kernel;
    data.report = prep.report;
    data.traj = run(prep.initial, cfg.kernel, cfg.solver);
    if (data.traj.aborted())
      throw InvariantError("acceptance run " + name + " aborted: " + data.traj.error);
    return runs.emplace(name, std::move(data)).first->second;
  }

  void add(AcceptanceReport& rep, const std::string& name, bool pass,
           const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
  }

  // ---- suite: conservation -------------------------------------------------

  void conservation_checks_for(AcceptanceReport& rep, const std::string& name) {
    const RunData& r = get_run(name);
    double m0 = r.traj.snapshots.front().diag.mass;
    double drift = 0.0, e_int = 0.0;
    for (const auto& s : r.traj.snapshots) {
      drift = std::max(drift, std::abs(s.diag.mass - m0));
      e_int = std::max(e_int, std::abs(s.diag.e_integral));
    }
    add(rep, name + "_mass", drift <= 1e-10 * m0,
        "max mass drift " + fmt(drift) + " vs " + fmt(1e-10 * m0));
    Field e0 = compute_e(r.initial, r.kernel);
    Field lp = l_psi(r.kernel, r.initial.rho, r.initial.rho);
    double scale = std::max(e0.max_abs(), 1e-3 * (1.0 + lp.max_abs()));
    add(rep, name + "_e_integral", e_int <= 1e-8 * scale,
        "max |int e| " + fmt(e_int) + " vs " + fmt(1e-8 * scale));
  }

  AcceptanceReport suite_conservation() {
    AcceptanceReport rep{"conservation", {}};
    // exact fixed point: uniform density, constant velocity
    GridPtr grid = TorusGrid::make(256);
    FlockState eq{Field(grid, 1.0), Field(grid, 1.0), 0.0};
    KernelSpec k = lip_kernel();
    Field drho(grid), du(grid);
    rhs(eq, k, drho, du);
    add(rep, "equilibrium_rhs_zero", drho.max_abs() <= 1e-13 && du.max_abs() <= 1e-13,
        "max |drho| = " + fmt(drho.max_abs()) + ", max |du| = " + fmt(du.max_abs()));
    SolverConfig sc;
    sc.t_end = 1.0;
    FlockState stepped = step(eq, k, sc);
    double dev = 0.0;
    for (int i = 0; i < 256; ++i) {
      dev = std::max(dev, std::abs(stepped.rho[i] - 1.0));
      dev = std::max(dev, std::abs(stepped.u[i] - 1.0));
    }
    add(rep, "equilibrium_step_fixed", dev <= 1e-13,
        "max state deviation after one step = " + fmt(dev));

    for (const char* name : {"equilibrium", "thm1_lip", "thm1_topo", "thm2_lip", "thm3_geo",
                             "thm3_tau_eq", "thm3_between", "thm3_above"})
      conservation_checks_for(rep, name);
    return rep;
  }

  // ---- suite: inequalities -------------------------------------------------

  AcceptanceReport suite_inequalities() {
    AcceptanceReport rep{"inequalities", {}};
    GridPtr grid = TorusGrid::make(128);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    const int trials = 500;
    const double r0 = 1.0;
    PoincareConstant pc = poincare_constant(r0, 256);

    KernelSpec kernels[3] = {lip_kernel(), geo_kernel(0.5), topo_kernel(0.5, 0.5)};
    int ck_fail = 0, poincare_fail = 0, diss_fail[3] = {0, 0, 0};
    double worst_poincare_margin = 1e300;
    for (int trial = 0; trial < trials; ++trial) {
      Field rho = random_density(grid, rng);
      CkBracket b;
      try {
        b = ck_bracket(rho);
      } catch (const InvariantError&) {
        ++ck_fail;
        continue;
      }
      double local = local_pair_energy(rho, r0);
      double need = pc.c_rigorous * b.upper;
      if (local + 1e-10 * std::max(1.0, need) < need) ++poincare_fail;
      if (need > 0.0) worst_poincare_margin = std::min(worst_poincare_margin, local / need);
      for (int ki = 0; ki < 3; ++ki) {
        try {
          dissipation_lower_check(rho, kernels[ki]);
        } catch (const InvariantError&) {
          ++diss_fail[ki];
        }
      }
    }
    add(rep, "csiszar_kullback_chain", ck_fail == 0,
        std::to_string(ck_fail) + " of " + std::to_string(trials) + " densities violated");
    add(rep, "lemma_near_diagonal_poincare", poincare_fail == 0,
        std::to_string(poincare_fail) + " violations; worst margin ratio " +
            fmt(worst_poincare_margin));
    const char* kn[3] = {"lipschitz", "geometric", "topological"};
    for (int ki = 0; ki < 3; ++ki)
      add(rep, std::string("dissipation_lower_") + kn[ki], diss_fail[ki] == 0,
          std::to_string(diss_fail[ki]) + " violations of " + std::to_string(trials));
    return rep;
  }

  // ---- suite: oracles ------------------------------------------------------

  AcceptanceReport suite_oracles() {
    AcceptanceReport rep{"oracles", {}};
    GridPtr grid = TorusGrid::make(64);
    Field f(grid), rho_unit(grid, 1.0);
    for (int i = 0; i < f.size(); ++i)
      f[i] = std::cos(grid->center(i)) + 0.3 * std::sin(2.0 * grid->center(i));
    auto fa = [](double x) { return std::cos(x) + 0.3 * std::sin(2.0 * x); };
    auto fa2 = [](double x) { return -std::cos(x) - 1.2 * std::sin(2.0 * x); };

    for (double alpha : {0.3, 0.5, 1.0, 1.5}) {
      KernelSpec k = geo_kernel(alpha);
      Field num = l_psi(k, rho_unit, f);
      double scale = 0.0, err = 0.0;
      std::vector<double> oracle(grid->n_cells());
      for (int i = 0; i < grid->n_cells(); ++i) {
        oracle[i] = oracle_lpsi_singular(fa, fa2, grid->center(i), k.lambda, k.r0, alpha, 1.0,
                                         0.0, grid->n_cells(), 16);
        scale = std::max(scale, std::abs(oracle[i]));
      }
      for (int i = 0; i < grid->n_cells(); ++i)
        err = std::max(err, std::abs(num[i] - oracle[i]));
      double tol = alpha < 1.0 ? 1e-2 : 5e-2;
      std::ostringstream name;
      name << "lpsi_oracle_alpha_" << alpha;
      add(rep, name.str(), err / scale <= tol,
          "relative error " + fmt(err / scale) + " vs tolerance " + fmt(tol));
    }

    // topological kernel over uniform density reduces to a scaled geometric one
    {
      double rho_bar = 2.0;
      Field rho(grid, rho_bar);
      KernelSpec k = topo_kernel(0.5, 0.5);
      Field num = l_psi(k, rho, f);
      double scale = 0.0, err = 0.0;
      for (int i = 0; i < grid->n_cells(); ++i) {
        double o = oracle_lpsi_singular(fa, fa2, grid->center(i), k.lambda, k.r0, k.alpha,
                                        rho_bar, k.tau, grid->n_cells(), 16);
        scale = std::max(scale, std::abs(o));
        err = std::max(err, std::abs(num[i] - o));
      }
      add(rep, "lpsi_oracle_topological_uniform", err / scale <= 1e-2,
          "relative error " + fmt(err / scale));
    }

    // force identity on random smooth fields
    {
      std::mt19937_64 rng(seed ^ 0x51ed2701a3c5db91ull);
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        Field rho = random_density(grid, rng);
        Field u = random_density(grid, rng);
        for (const KernelSpec& k :
             {lip_kernel(), geo_kernel(0.5), geo_kernel(1.5), topo_kernel(0.5, 0.8)}) {
          Field force = alignment_force(k, rho, u);
          Field ru(grid);
          for (int i = 0; i < ru.size(); ++i) ru[i] = rho[i] * u[i];
          Field a = l_psi(k, rho, ru), b = l_psi(k, rho, rho);
          double scale = std::max(1.0, force.max_abs());
          for (int i = 0; i < force.size(); ++i)
            worst = std::max(worst, std::abs(force[i] - (a[i] - u[i] * b[i])) / scale);
        }
      }
      add(rep, "force_identity", worst <= 1e-10, "max relative defect " + fmt(worst));
    }
    return rep;
  }

  // ---- suite: theorem1 (+ entropy balance refinement) ----------------------

  void decay_check(AcceptanceReport& rep, const std::string& label, const std::string& run_name) {
    const RunData& r = get_run(run_name);
    DecayFit fit = fit_decay_rate(r.traj);
    bool ok = fit.points >= 5 && fit.rate >= r.report.theorem1_rate_value &&
              fit.r_squared >= 0.98;
    add(rep, label, ok,
        "fitted rate " + fmt(fit.rate) + " vs guaranteed " + fmt(r.report.theorem1_rate_value) +
            ", R^2 = " + fmt(fit.r_squared) + " (" + std::to_string(fit.points) + " points)");
  }

  double entropy_residual_tail(const std::string& run_name) {
    const RunData& r = get_run(run_name);
    double t0 = tail_start(r.traj);
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < r.traj.snapshots.size(); ++i) {
      const auto& d = r.traj.snapshots[i].diag;
      if (d.time >= t0) m = std::max(m, d.entropy_residual);
    }
    return m;
  }

  AcceptanceReport suite_theorem1() {
    AcceptanceReport rep{"theorem1", {}};
    decay_check(rep, "lipschitz_decay_rate", "thm1_lip");
    decay_check(rep, "topological_decay_rate", "thm1_topo");

    double r64 = entropy_residual_tail("entropy_n64");
    double r128 = entropy_residual_tail("entropy_n128");
    double r256 = entropy_residual_tail("entropy_n256");
    add(rep, "entropy_residual_n256", r256 <= 0.05, "tail-max residual " + fmt(r256));
    add(rep, "entropy_residual_refinement", r64 > r128 && r128 > r256,
        "tail-max residuals " + fmt(r64) + " > " + fmt(r128) + " > " + fmt(r256));
    return rep;
  }

  // ---- suite: theorem2 (+ q-transport) -------------------------------------

  double q_drift(const std::string& run_name) {
    const RunData& r = get_run(run_name);
    double q0 = r.traj.snapshots.front().diag.sup_q;
    double d = 0.0;
    for (const auto& s : r.traj.snapshots) d = std::max(d, std::abs(s.diag.sup_q - q0));
    return d / q0;
  }

  AcceptanceReport suite_theorem2() {
    AcceptanceReport rep{"theorem2", {}};
    const RunData& r = get_run("thm2_lip");
    double l1 = tail_max(r.traj, [](const DiagnosticsRecord& d) { return d.l1_dev; });
    double sup = tail_max(r.traj, [](const DiagnosticsRecord& d) { return d.sup_rho; });
    double bound = r.report.theorem2_l1_bound.value_or(0.0);
    add(rep, "l1_tail_bound", l1 <= bound,
        "tail-max l1_dev " + fmt(l1) + " vs bound " + fmt(bound));
    add(rep, "sup_rho_bound", sup <= r.report.density_amp_bound * 1.05,
        "tail-max sup_rho " + fmt(sup) + " vs B = " + fmt(r.report.density_amp_bound));

    double d64 = q_drift("thm2_lip_n64");
    double d128 = q_drift("thm2_lip_n128");
    double d256 = q_drift("thm2_lip");
    add(rep, "q_drift_n256", d256 <= 0.05, "relative sup_q drift " + fmt(d256));
    add(rep, "q_drift_refinement", d64 > d128 && d128 > d256,
        "drifts " + fmt(d64) + " > " + fmt(d128) + " > " + fmt(d256));
    return rep;
  }

  // ---- suite: theorem3 -----------------------------------------------------

  void theorem3_run_check(AcceptanceReport& rep, const std::string& label,
                          const std::string& run_name) {
    const RunData& r = get_run(run_name);
    double l1 = tail_max(r.traj, [](const DiagnosticsRecord& d) { return d.l1_dev; });
    double sup = tail_max(r.traj, [](const DiagnosticsRecord& d) { return d.sup_rho; });
    double bound = r.report.theorem3_l1_bound.value_or(0.0);
    add(rep, label + "_l1", l1 <= bound, "tail-max l1_dev " + fmt(l1) + " vs " + fmt(bound));
    add(rep, label + "_sup_rho", sup <= r.report.density_amp_bound * 1.05,
        "tail-max sup_rho " + fmt(sup) + " vs B = " + fmt(r.report.density_amp_bound));
  }

  void rejection_check(AcceptanceReport& rep, const std::string& label, double alpha,
                       double tau) {
    KernelSpec k = topo_kernel(alpha, tau);
    double threshold =
        k.lambda * std::pow(kTwoPi, -tau) * std::pow(k.r0, tau - alpha) / (tau - alpha);
    RunSpec spec{k, 1.5 * threshold, 30.0, 0.2, 256, false};
    try {
      prepare(to_config(spec));
      add(rep, label, false, "config at 150% of threshold was not rejected");
    } catch (const SmallnessViolation& e) {
      bool ok = std::abs(e.threshold - threshold) <= 1e-9 * threshold &&
                std::string(e.what()).find(fmt(threshold).substr(0, 6)) != std::string::npos;
      add(rep, label, ok,
          std::string("rejected with threshold ") + fmt(e.threshold) + " (expected " +
              fmt(threshold) + "); message: " + e.what());
    }
  }

  AcceptanceReport suite_theorem3() {
    AcceptanceReport rep{"theorem3", {}};
    theorem3_run_check(rep, "geometric", "thm3_geo");
    theorem3_run_check(rep, "tau_equals_alpha", "thm3_tau_eq");
    theorem3_run_check(rep, "tau_between", "thm3_between");
    theorem3_run_check(rep, "tau_above", "thm3_above");
    rejection_check(rep, "smallness_rejection_tau_between", 0.5, 0.8);
    rejection_check(rep, "smallness_rejection_tau_above", 0.5, 1.6);
    return rep;
  }

  // ---- suite: envelopes ----------------------------------------------------

  AcceptanceReport suite_envelopes() {
    AcceptanceReport rep{"envelopes", {}};
    for (const char* name : {"thm1_lip", "thm1_topo", "thm2_lip", "thm3_geo", "thm3_tau_eq",
                             "thm3_between", "thm3_above"}) {
      const RunData& r = get_run(name);
      double worst = 0.0;
      for (const auto& s : r.traj.snapshots) {
        double env = logistic_envelope(r.report.logistic, s.diag.time);
        worst = std::max(worst, s.diag.sup_rho / env);
      }
      add(rep, std::string(name) + "_envelope", worst <= 1.05,
          "max sup_rho / envelope = " + fmt(worst));
    }
    return rep;
  }
};

AcceptanceRunner::AcceptanceRunner(std::uint64_t seed) : impl_(new Impl(seed)) {}
AcceptanceRunner::~AcceptanceRunner() = default;

std::vector<std::string> AcceptanceRunner::suite_names() {
  return {"conservation", "inequalities", "oracles", "theorem1",
          "theorem2",     "theorem3",     "envelopes"};
}

AcceptanceReport AcceptanceRunner::run_suite(const std::string& suite) {
  if (suite == "conservation") return impl_->suite_conservation();
  if (suite == "inequalities") return impl_->suite_inequalities();
  if (suite == "oracles") return impl_->suite_oracles();
  if (suite == "theorem1") return impl_->suite_theorem1();
  if (suite == "theorem2") return impl_->suite_theorem2();
  if (suite == "theorem3") return impl_->suite_theorem3();
  if (suite == "envelopes") return impl_->suite_envelopes();
  throw ConfigError("unknown acceptance suite: " + suite);
}

std::string AcceptanceRunner::report_json(const std::vector<AcceptanceReport>& reports) const {
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    suites.push_back({{"suite", r.suite}, {"all_pass", r.all_pass()}, {"checks", checks}});
  }
  return nlohmann::json{{"schema_version", kSchemaVersion}, {"suites", suites}}.dump(2);
}

}  // namespace flock
