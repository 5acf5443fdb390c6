#pragma once

#include "flock/grid.hpp"
#include "flock/kernels.hpp"

namespace flock {

/// Per-time snapshot of every tracked quantity.
struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double mean_density = 0.0;  // mass / 2pi
  double entropy = 0.0;       // H = int rho log(rho/rho_bar)
  double l1_dev = 0.0;        // ||rho - rho_bar||_L1
  double l2_dev_sq = 0.0;     // ||rho - rho_bar||_L2^2
  double sup_rho = 0.0;
  double sup_q = 0.0;
  double e_integral = 0.0;
  double dissipation = 0.0;
  double entropy_residual = 0.0;  // filled post-run (centered time difference)
  double cross_term = 0.0;        // int (rho - rho_bar) rho q dx (not serialized)
};

struct PoincareConstant {
  double r0;
  double epsilon;     // 1 - max_{k != 0} |chi_hat(k)|
  double c_paper;     // 2 eps^2, as printed in the source
  double c_rigorous;  // eps^2 / 2, what the displayed chain supports
};

Field compute_e(const FlockState& state, const KernelSpec& kernel);
Field compute_q(const FlockState& state, const KernelSpec& kernel);

/// Relative entropy H = int rho log(rho/rho_bar) dx, clipped at 0 near rounding.
double entropy(const Field& rho);

struct CkBracket {
  double lower;   // ||rho - rho_bar||_L1^2 / 4pi
  double middle;  // rho_bar * H
  double upper;   // ||rho - rho_bar||_L2^2
};

/// Csiszar-Kullback chain lower <= middle <= upper; throws InvariantError if
/// it fails beyond -1e-10 * scale.
CkBracket ck_bracket(const Field& rho);

/// (1/2) sum_{i != j} psi(i,j) (rho_i - rho_j)^2 dx^2.
double dissipation(const Field& rho, const KernelSpec& kernel);

/// Trapezoidal cutoff chi (plateau on |z| <= r0/2, zero beyond r0, unit
/// integral); closed-form transform scanned over 1 <= |k| <= k_max with a
/// certified quadratic tail bound.
PoincareConstant poincare_constant(double r0, int k_max);

/// Checks dissipation >= c_rigorous * psi_lower * ||rho - rho_bar||_L2^2
/// with psi_lower at the kernel's guaranteed radius.
bool dissipation_lower_check(const Field& rho, const KernelSpec& kernel);

/// All fields except entropy_residual.
DiagnosticsRecord snapshot_diagnostics(const FlockState& state, const KernelSpec& kernel);

/// Centered-in-time residual of dH/dt = -cross - dissipation, normalized by
/// max(|dH/dt|, dissipation, 1e-14).
double entropy_balance_residual(const DiagnosticsRecord& prev, const DiagnosticsRecord& mid,
                                const DiagnosticsRecord& next);

/// Record invariants (H >= 0, CK chain); throws InvariantError.
void validate_record(const DiagnosticsRecord& rec);

}  // namespace flock
