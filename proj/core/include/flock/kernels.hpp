#pragma once

#include <functional>
#include <optional>
#include <string>

#include "flock/grid.hpp"

namespace flock {

enum class KernelVariant { Lipschitz, Geometric, Topological };

std::string to_string(KernelVariant v);

/// Optional user profile for the Lipschitz variant: psi(z) as a function of
/// geodesic distance z >= 0.  guaranteed_radius is the radius on which the
/// profile is known to stay >= lambda (enters every near-diagonal lower
/// bound).
struct LipschitzProfile {
  std::function<double(double)> value;
  double guaranteed_radius = 0.0;
};

struct KernelSpec {
  KernelVariant variant = KernelVariant::Lipschitz;
  double lambda = 1.0;  // communication strength
  double r0 = 1.0;      // communication radius, in (0, pi]
  double alpha = 0.5;   // singularity order, in (0, 2); singular variants
  double tau = 0.0;     // topological weight, >= 0; Topological only
  std::optional<LipschitzProfile> lipschitz_profile;  // default: plateau

  /// Throws DomainError on invalid parameters.
  void validate() const;

  /// Default Lipschitz profile: lambda on |z| <= r0/2, linear to 0 at r0.
  double profile_value(double z) const;

  /// Radius on which psi >= psi_lower_bound is guaranteed: r0 for singular
  /// variants, the plateau radius (r0/2 by default) for Lipschitz.
  double lower_bound_radius() const;

  bool singular() const { return variant != KernelVariant::Lipschitz; }
};

struct KernelNorms {
  double l1_norm;
  double linf_norm;
};

/// Mass of rho along the short (geodesic) arc between cell centers i and j.
/// Spectrally accurate for smooth rho; symmetric in (i, j).
double topological_distance(const Field& rho, int i, int j);

/// Point value psi(x_i, x_j); zero beyond geodesic distance r0 for the
/// minimal h / default profile.  Symmetric.
double kernel_value(const KernelSpec& spec, const Field& rho, int i, int j);

/// L_psi f(x) = int psi(x,y)(f(y) - f(x)) dy.  Punctured symmetric-pair
/// midpoint sum with a partial-cell weight at the support boundary and, for
/// singular variants, an analytic Taylor correction for the omitted diagonal
/// cell.  Exactly zero on constants.
Field l_psi(const KernelSpec& spec, const Field& rho, const Field& f);

/// Alignment force int psi(x,y)(u(y) - u(x)) rho(y) dy, discretized so that
/// the identity force = L_psi(rho u) - u L_psi(rho) holds to rounding.
Field alignment_force(const KernelSpec& spec, const Field& rho, const Field& u);

/// Lower bound on inf{psi(x,y): |x-y| < lower_bound_radius()}.  For the
/// Topological variant eta must lie in [0, min(tau, 1+alpha)].
double psi_lower_bound(const KernelSpec& spec, double rho_sup, double m0, double eta);

/// L1/Linf norms of the Lipschitz profile (8x refined sampling).
KernelNorms lipschitz_norms(const KernelSpec& spec);

/// max_i sum_j psi(i,j) rho_j dx; explicit-stability scale of the alignment
/// relaxation.
double max_row_sum(const KernelSpec& spec, const Field& rho);

}  // namespace flock
