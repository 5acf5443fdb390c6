#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flock/diagnostics.hpp"
#include "flock/kernels.hpp"
#include "flock/solver.hpp"

namespace flock {

/// Kernel regime for the density-amplitude estimates.  Partition of
/// (alpha, tau) for topological kernels; Lipschitz disjoint by variant.
enum class AmplitudeCase { Lipschitz, TauBelowAlpha, TauEqualsAlpha, TauBetween, TauAboveAlphaPlusOne };

std::string to_string(AmplitudeCase c);

AmplitudeCase classify_amplitude_case(const KernelSpec& kernel);

struct LogisticEnvelope {
  double rate_factor;       // A in X' <= A X (B - X)
  double carrying_capacity; // B
  double x0;
};

/// X(t) bound from the logistic differential inequality.
double logistic_envelope(double a, double b, double x0, double t);
double logistic_envelope(const LogisticEnvelope& env, double t);

struct SmallnessStatus {
  bool required = false;
  double threshold = 0.0;  // on sup|q0|; infinity when not required
  double value = 0.0;      // sup|q0|
  bool satisfied = true;
  double margin = 0.0;            // threshold - value
  double relaxed_threshold = 0.0; // -inf q0 < threshold form (informational)
  bool relaxed_satisfied = true;
};

struct AmplitudeBound {
  AmplitudeCase amp_case;
  double sup_bound;            // B, limsup bound on ||rho||_inf
  std::optional<double> r_opt; // minimizing radius, when one exists
  double rate_factor;          // A of the case's differential inequality
  SmallnessStatus smallness;
};

/// Case-selected limsup bound on the density amplitude.  Throws
/// SmallnessViolation when the case requires smallness and it fails.
AmplitudeBound density_amplitude_bound(const KernelSpec& kernel, double m0, double sup_q0);

/// Smallness status only (no throw); usable for config-time rejection.
SmallnessStatus check_smallness(const KernelSpec& kernel, double m0, double sup_q0,
                                double inf_q0);

/// Exponential decay rate lambda*c2 for e0 = 0 data.
double theorem1_rate(const KernelSpec& kernel, double m0, double rho0_sup);

/// Lipschitz limsup L1 bound.  Requires sup_q0 < ||psi||_L1.
double theorem2_bound(const KernelNorms& norms, double m0, double sup_q0, double lambda,
                      double c_r0);

/// Topological limsup L1 bound with the eta-family constant made explicit.
double theorem3_bound_eta(const KernelSpec& kernel, double m0, double sup_q0, double eta);

/// eta fixed to tau (tau < 1+alpha) or 1+alpha (tau >= 1+alpha).
double theorem3_bound(const KernelSpec& kernel, double m0, double sup_q0);

struct BoundReport {
  KernelSpec kernel;
  double m0 = 0.0;
  double rho0_sup = 0.0;
  double sup_q0 = 0.0;
  double inf_q0 = 0.0;
  bool e0_zero = false;
  SmallnessStatus smallness;
  AmplitudeCase amp_case = AmplitudeCase::Lipschitz;
  double theorem1_rate_value = 0.0;
  std::optional<double> theorem2_l1_bound;
  std::optional<double> theorem3_l1_bound;
  double density_amp_bound = 0.0;
  std::optional<double> optimal_r;
  LogisticEnvelope logistic{0.0, 0.0, 0.0};
  PoincareConstant poincare{0.0, 0.0, 0.0, 0.0};
  std::optional<KernelNorms> norms;  // Lipschitz only
};

/// Evaluates every applicable bound for the given configuration.
BoundReport make_bound_report(const KernelSpec& kernel, double m0, double rho0_sup,
                              double sup_q0, double inf_q0, bool e0_zero);

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct CheckSummary {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

/// Tail-window comparison of a trajectory against the report's bounds: L1
/// disorder vs the applicable theorem bound, sup rho vs the amplitude bound
/// and its logistic envelope, and for e0 = 0 data the fitted decay rate.
CheckSummary check_trajectory(const Trajectory& traj, const BoundReport& report,
                              double tail_fraction = 0.25);

/// Least-squares slope/R^2 of log(l1_dev) over snapshots with
/// l1_dev in [1e-6, 1e-1].
struct DecayFit {
  double rate = 0.0;  // positive = decay
  double r_squared = 0.0;
  int points = 0;
};
DecayFit fit_decay_rate(const Trajectory& traj);

}  // namespace flock
