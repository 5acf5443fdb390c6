#include "flock/solver.hpp"

#include <algorithm>
#include <cmath>

#include "flock/errors.hpp"

namespace flock {

void SolverConfig::validate() const {
  if (cfl <= 0.0 || cfl > 1.0) throw DomainError("solver: cfl must lie in (0, 1]");
  if (t_end < 0.0) throw DomainError("solver: t_end must be nonnegative");
  if (max_steps <= 0) throw DomainError("solver: max_steps must be positive");
  if (record_every <= 0.0) throw DomainError("solver: record_every must be positive");
  if (positivity_floor <= 0.0) throw DomainError("solver: positivity_floor must be positive");
}

namespace {

/// Third-order upwind-biased derivative of u at cell i, biased by sign(u_i).
double upwind3(const Field& u, int i, double h) {
  const auto& g = u.grid();
  if (u[i] >= 0.0)
    return (2.0 * u[g.wrap(i + 1)] + 3.0 * u[i] - 6.0 * u[g.wrap(i - 1)] + u[g.wrap(i - 2)]) /
           (6.0 * h);
  return -(2.0 * u[g.wrap(i - 1)] + 3.0 * u[i] - 6.0 * u[g.wrap(i + 1)] + u[g.wrap(i + 2)]) /
         (6.0 * h);
}

}  // namespace

void rhs(const FlockState& state, const KernelSpec& kernel, Field& drho, Field& du) {
  const Field& rho = state.rho;
  const Field& u = state.u;
  const auto& g = rho.grid();
  const int n = g.n_cells();
  const double h = g.dx();

  // Local Lax-Friedrichs flux for (rho u)' on MUSCL central-slope states.
  // flux[i] lives at the interface x_{i+1/2}.
  std::vector<double> flux(n);
  for (int i = 0; i < n; ++i) {
    int ip = g.wrap(i + 1);
    double srho_i = 0.5 * (rho[ip] - rho[g.wrap(i - 1)]);
    double srho_p = 0.5 * (rho[g.wrap(i + 2)] - rho[i]);
    double su_i = 0.5 * (u[ip] - u[g.wrap(i - 1)]);
    double su_p = 0.5 * (u[g.wrap(i + 2)] - u[i]);
    double rho_l = rho[i] + 0.5 * srho_i, u_l = u[i] + 0.5 * su_i;
    double rho_r = rho[ip] - 0.5 * srho_p, u_r = u[ip] - 0.5 * su_p;
    double a = std::max(std::abs(u_l), std::abs(u_r));
    flux[i] = 0.5 * (rho_l * u_l + rho_r * u_r) - 0.5 * a * (rho_r - rho_l);
  }
  Field force = alignment_force(kernel, rho, u);
  for (int i = 0; i < n; ++i) {
    drho[i] = -(flux[i] - flux[g.wrap(i - 1)]) / h;
    du[i] = -u[i] * upwind3(u, i, h) + force[i];
  }
}

namespace {

double stable_dt(const FlockState& state, const KernelSpec& kernel, const SolverConfig& config) {
  double h = state.rho.grid().dx();
  double dt_adv = h / (state.u.max_abs() + 1e-12);
  double s_max = max_row_sum(kernel, state.rho);
  double dt_relax = 1.0 / std::max(s_max, 1e-12);
  return config.cfl * std::min(dt_adv, dt_relax);
}

void axpy_state(FlockState& out, double c0, const FlockState& s0, double c1,
                const FlockState& s1, double dt, const Field& drho, const Field& du) {
  for (int i = 0; i < out.rho.size(); ++i) {
    out.rho[i] = c0 * s0.rho[i] + c1 * (s1.rho[i] + dt * drho[i]);
    out.u[i] = c0 * s0.u[i] + c1 * (s1.u[i] + dt * du[i]);
  }
}

}  // namespace

FlockState step(const FlockState& state, const KernelSpec& kernel, const SolverConfig& config,
                double dt_max) {
  double dt = std::min(stable_dt(state, kernel, config), dt_max);
  Field drho(state.rho.grid_ptr()), du(state.u.grid_ptr());

  FlockState s1 = state;
  rhs(state, kernel, drho, du);
  axpy_state(s1, 0.0, state, 1.0, state, dt, drho, du);

  FlockState s2 = state;
  rhs(s1, kernel, drho, du);
  axpy_state(s2, 0.75, state, 0.25, s1, dt, drho, du);

  FlockState out = state;
  rhs(s2, kernel, drho, du);
  axpy_state(out, 1.0 / 3.0, state, 2.0 / 3.0, s2, dt, drho, du);

  out.time = state.time + dt;
  out.rho.check_finite("step: rho");
  out.u.check_finite("step: u");
  if (out.rho.min() < config.positivity_floor)
    throw PositivityError("step: density fell below the positivity floor at t = " +
                          std::to_string(out.time));
  return out;
}

Trajectory run(const FlockState& initial, const KernelSpec& kernel, const SolverConfig& config) {
  config.validate();
  kernel.validate();
  Trajectory traj;
  traj.config = config;
  FlockState state = initial;
  state.time = 0.0;

  auto record = [&](const FlockState& s) {
    traj.snapshots.push_back({s, snapshot_diagnostics(s, kernel)});
  };

  try {
    record(state);
    double t_next = config.record_every;
    long steps = 0;
    while (state.time < config.t_end - 1e-12) {
      if (++steps > config.max_steps)
        throw StepLimitError("run: exceeded max_steps = " + std::to_string(config.max_steps));
      double dt_cap = std::min(t_next, config.t_end) - state.time;
      state = step(state, kernel, config, dt_cap);
      if (state.time >= std::min(t_next, config.t_end) - 1e-12) {
        record(state);
        while (t_next <= state.time + 1e-12) t_next += config.record_every;
      }
    }
    // entropy-balance residual via centered differences over the records
    for (std::size_t m = 1; m + 1 < traj.snapshots.size(); ++m) {
      traj.snapshots[m].diag.entropy_residual = entropy_balance_residual(
          traj.snapshots[m - 1].diag, traj.snapshots[m].diag, traj.snapshots[m + 1].diag);
    }
  } catch (const FlockError& err) {
    traj.error = err.what();
  }
  return traj;
}

}  // namespace flock
