#pragma once

// Internal quadrature machinery shared by the kernel operators and the
// dissipation functional.  Not installed.

#include <algorithm>
#include <cmath>
#include <vector>

#include "flock/errors.hpp"
#include "flock/fourier.hpp"
#include "flock/grid.hpp"
#include "flock/kernels.hpp"

namespace flock::detail {

/// Fraction of the offset cell [z - h/2, z + h/2] inside the support [0, r0].
inline double cell_overlap(double z, double h, double r0) {
  double lo = std::max(z - 0.5 * h, 0.0);
  double hi = std::min(z + 0.5 * h, r0);
  return std::clamp((hi - lo) / h, 0.0, 1.0);
}

/// Quadrature weights by offset k = 1..n/2 for the rho-independent kernel
/// factor.  Lipschitz: the profile itself; singular variants: the |z| power
/// with the support cutoff resolved by cell overlap.
inline std::vector<double> offset_weights(const KernelSpec& spec, const TorusGrid& grid) {
  const int half = grid.n_cells() / 2;
  const double h = grid.dx();
  std::vector<double> w(half + 1, 0.0);
  for (int k = 1; k <= half; ++k) {
    double z = k * h;
    if (spec.variant == KernelVariant::Lipschitz) {
      w[k] = spec.profile_value(z);
    } else {
      double ov = cell_overlap(z, h, spec.r0);
      if (ov > 0.0) {
        double p = spec.variant == KernelVariant::Geometric ? 1.0 + spec.alpha
                                                            : 1.0 + spec.alpha - spec.tau;
        w[k] = spec.lambda * std::pow(z, -p) * ov;
      }
    }
  }
  return w;
}

struct TopoContext {
  std::vector<double> cummass;  // antiderivative of rho at the centers
  double m0 = 0.0;
};

inline TopoContext make_topo_context(const Field& rho) {
  if (rho.min() <= 0.0)
    throw SingularityError("topological kernel: density must be positive");
  TopoContext ctx;
  ctx.cummass = spectral_antiderivative(rho).values();
  ctx.m0 = integrate(rho);
  return ctx;
}

/// Mass along the short (geodesic) arc between centers i and j.  Canonical
/// ordering keeps the value exactly symmetric; the tie at half-torus
/// separation takes the direct arc.
inline double arc_mass(const TopoContext& ctx, int n, int i, int j) {
  int a = std::min(i, j), b = std::max(i, j);
  double fw = ctx.cummass[b] - ctx.cummass[a];
  double d = (2 * (b - a) > n) ? ctx.m0 - fw : fw;
  return std::abs(d);
}

/// Near-diagonal Taylor coefficient: the omitted cell |z| < dx/2 contributes
/// f''(x) * int_0^{dx/2} z^2 psi(z) dz with psi ~ lam rho(x)^{-tau} z^{-1-a}.
inline double diagonal_coeff(const KernelSpec& spec, double rho_i, double h) {
  if (!spec.singular()) return 0.0;
  double c = spec.lambda * std::pow(0.5 * h, 2.0 - spec.alpha) / (2.0 - spec.alpha);
  if (spec.variant == KernelVariant::Topological) c *= std::pow(rho_i, -spec.tau);
  return c;
}

inline double second_difference(const Field& f, int i) {
  const auto& g = f.grid();
  double h = g.dx();
  return (f[g.wrap(i + 1)] - 2.0 * f[i] + f[g.wrap(i - 1)]) / (h * h);
}

/// Same correction in conservative flux form, (w f')' with w evaluated at the
/// cell interfaces from midpoint densities.  Telescopes to zero under the
/// periodic sum (so the operator integrates to zero exactly) and picks up the
/// -tau rho'^2 / rho cross term of the near-diagonal expansion.
inline double diagonal_correction(const KernelSpec& spec, const Field& rho, const Field& f,
                                  int i) {
  if (!spec.singular()) return 0.0;
  const auto& g = f.grid();
  const double h = g.dx();
  const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
  double c = spec.lambda * std::pow(0.5 * h, 2.0 - spec.alpha) / (2.0 - spec.alpha);
  double wp = c, wm = c;
  if (spec.variant == KernelVariant::Topological) {
    wp *= std::pow(0.5 * (rho[i] + rho[ip]), -spec.tau);
    wm *= std::pow(0.5 * (rho[i] + rho[im]), -spec.tau);
  }
  return (wp * (f[ip] - f[i]) - wm * (f[i] - f[im])) / (h * h);
}

}  // namespace flock::detail
