#pragma once

#include <string>
#include <vector>

#include "flock/diagnostics.hpp"
#include "flock/grid.hpp"
#include "flock/kernels.hpp"

namespace flock {

struct SolverConfig {
  double cfl = 0.4;
  double t_end = 1.0;
  long max_steps = 5'000'000;
  double record_every = 0.5;
  double positivity_floor = 1e-10;

  void validate() const;
};

struct Snapshot {
  FlockState state;
  DiagnosticsRecord diag;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  SolverConfig config;
  std::string error;  // empty on clean completion

  bool aborted() const { return !error.empty(); }
};

/// Semi-discrete right-hand side: conservative LLF density flux on
/// MUSCL-reconstructed states, upwind-biased u advection, alignment force.
void rhs(const FlockState& state, const KernelSpec& kernel, Field& drho, Field& du);

/// One SSP-RK3 step; dt = cfl * min(dx/(max|u| + eps), 1/S_max) clamped to
/// dt_max.  Throws PositivityError if min rho falls below the floor.
FlockState step(const FlockState& state, const KernelSpec& kernel, const SolverConfig& config,
                double dt_max = 1e300);

/// Integrate to t_end, recording diagnostics at the configured cadence (plus
/// the final time).  Solver errors abort integration; the partial trajectory
/// is returned with the error attached.
Trajectory run(const FlockState& initial, const KernelSpec& kernel, const SolverConfig& config);

}  // namespace flock
