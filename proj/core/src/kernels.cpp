#include "flock/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "flock/errors.hpp"
#include "kernel_detail.hpp"

namespace flock {

using detail::arc_mass;
using detail::diagonal_coeff;
using detail::make_topo_context;
using detail::offset_weights;
using detail::second_difference;
using detail::TopoContext;

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::Lipschitz: return "lipschitz";
    case KernelVariant::Geometric: return "geometric";
    case KernelVariant::Topological: return "topological";
  }
  return "?";
}

void KernelSpec::validate() const {
  if (lambda <= 0.0) throw DomainError("kernel: lambda must be positive");
  if (r0 <= 0.0 || r0 > kPi + 1e-12) throw DomainError("kernel: r0 must lie in (0, pi]");
  if (singular()) {
    if (alpha <= 0.0 || alpha >= 2.0) throw DomainError("kernel: alpha must lie in (0, 2)");
    if (variant == KernelVariant::Geometric && tau != 0.0)
      throw DomainError("kernel: geometric variant fixes tau = 0");
    if (tau < 0.0) throw DomainError("kernel: tau must be nonnegative");
  } else if (lipschitz_profile) {
    const auto& p = *lipschitz_profile;
    if (p.guaranteed_radius <= 0.0 || p.guaranteed_radius > r0)
      throw DomainError("kernel: profile guaranteed_radius must lie in (0, r0]");
    const int samples = 2048;
    for (int i = 0; i <= samples; ++i) {
      double z = kPi * i / samples;
      double v = p.value(z);
      if (v < 0.0) throw DomainError("kernel: profile must be nonnegative");
      if (z <= p.guaranteed_radius && v < lambda * (1.0 - 1e-12))
        throw DomainError("kernel: profile below lambda inside its guaranteed radius");
    }
  }
}

double KernelSpec::profile_value(double z) const {
  z = std::abs(z);
  if (lipschitz_profile) return lipschitz_profile->value(z);
  if (z <= 0.5 * r0) return lambda;
  if (z < r0) return lambda * (r0 - z) / (0.5 * r0);
  return 0.0;
}

double KernelSpec::lower_bound_radius() const {
  if (singular()) return r0;
  return lipschitz_profile ? lipschitz_profile->guaranteed_radius : 0.5 * r0;
}

double topological_distance(const Field& rho, int i, int j) {
  if (i == j) return 0.0;
  TopoContext ctx = make_topo_context(rho);
  return arc_mass(ctx, rho.size(), i, j);
}

double kernel_value(const KernelSpec& spec, const Field& rho, int i, int j) {
  if (i == j) return 0.0;
  double z = rho.grid().geodesic(i, j);
  if (spec.variant == KernelVariant::Lipschitz) return spec.profile_value(z);
  if (z > spec.r0) return 0.0;
  if (spec.variant == KernelVariant::Geometric)
    return spec.lambda * std::pow(z, -1.0 - spec.alpha);
  double d = topological_distance(rho, i, j);
  return spec.lambda * std::pow(z, -(1.0 + spec.alpha - spec.tau)) * std::pow(d, -spec.tau);
}

Field l_psi(const KernelSpec& spec, const Field& rho, const Field& f) {
  const auto& g = f.grid();
  const int n = g.n_cells();
  const int half = n / 2;
  const double h = g.dx();
  std::vector<double> w = offset_weights(spec, g);
  const bool topo = spec.variant == KernelVariant::Topological;
  TopoContext ctx;
  if (topo) ctx = make_topo_context(rho);

  Field out(f.grid_ptr());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 1; k <= half; ++k) {
      if (w[k] == 0.0) continue;
      int jp = g.wrap(i + k);
      if (k == half) {
        double wk = topo ? w[k] * std::pow(arc_mass(ctx, n, i, jp), -spec.tau) : w[k];
        s += wk * (f[jp] - f[i]);
      } else {
        int jm = g.wrap(i - k);
        double wp = w[k], wm = w[k];
        if (topo) {
          wp *= std::pow(arc_mass(ctx, n, i, jp), -spec.tau);
          wm *= std::pow(arc_mass(ctx, n, i, jm), -spec.tau);
        }
        s += wp * (f[jp] - f[i]) + wm * (f[jm] - f[i]);
      }
    }
    out[i] = s * h;
    if (spec.singular()) out[i] += detail::diagonal_correction(spec, rho, f, i);
  }
  return out;
}

Field alignment_force(const KernelSpec& spec, const Field& rho, const Field& u) {
  const auto& g = u.grid();
  const int n = g.n_cells();
  const int half = n / 2;
  const double h = g.dx();
  std::vector<double> w = offset_weights(spec, g);
  const bool topo = spec.variant == KernelVariant::Topological;
  TopoContext ctx;
  if (topo) ctx = make_topo_context(rho);

  Field ru(u.grid_ptr());
  for (int i = 0; i < n; ++i) ru[i] = rho[i] * u[i];

  Field out(u.grid_ptr());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 1; k <= half; ++k) {
      if (w[k] == 0.0) continue;
      int jp = g.wrap(i + k);
      if (k == half) {
        double wk = topo ? w[k] * std::pow(arc_mass(ctx, n, i, jp), -spec.tau) : w[k];
        s += wk * (u[jp] - u[i]) * rho[jp];
      } else {
        int jm = g.wrap(i - k);
        double wp = w[k], wm = w[k];
        if (topo) {
          wp *= std::pow(arc_mass(ctx, n, i, jp), -spec.tau);
          wm *= std::pow(arc_mass(ctx, n, i, jm), -spec.tau);
        }
        s += wp * (u[jp] - u[i]) * rho[jp] + wm * (u[jm] - u[i]) * rho[jm];
      }
    }
    out[i] = s * h;
    if (spec.singular())
      out[i] += detail::diagonal_correction(spec, rho, ru, i) -
                u[i] * detail::diagonal_correction(spec, rho, rho, i);
  }
  return out;
}

double psi_lower_bound(const KernelSpec& spec, double rho_sup, double m0, double eta) {
  if (spec.variant == KernelVariant::Lipschitz) return spec.lambda;
  double eta_max = std::min(spec.tau, 1.0 + spec.alpha);
  if (eta < 0.0 || eta > eta_max + 1e-12)
    throw DomainError("psi_lower_bound: eta must lie in [0, min(tau, 1+alpha)]");
  return spec.lambda / (std::pow(spec.r0, 1.0 + spec.alpha - eta) * std::pow(m0, eta) *
                        std::pow(rho_sup, spec.tau - eta));
}

KernelNorms lipschitz_norms(const KernelSpec& spec) {
  if (spec.variant != KernelVariant::Lipschitz)
    throw VariantError("lipschitz_norms: kernel norms are only finite for the Lipschitz variant");
  const int n_fine = 8 * 8192;
  const double h = 2.0 * kPi / n_fine;
  double l1 = 0.0, linf = 0.0;
  for (int i = 0; i < n_fine; ++i) {
    double z = -kPi + (i + 0.5) * h;
    double v = spec.profile_value(z);
    l1 += v * h;
    linf = std::max(linf, v);
  }
  return {l1, linf};
}

double max_row_sum(const KernelSpec& spec, const Field& rho) {
  const auto& g = rho.grid();
  const int n = g.n_cells();
  const int half = n / 2;
  const double h = g.dx();
  std::vector<double> w = offset_weights(spec, g);
  const bool topo = spec.variant == KernelVariant::Topological;
  TopoContext ctx;
  if (topo) ctx = make_topo_context(rho);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 1; k <= half; ++k) {
      if (w[k] == 0.0) continue;
      int jp = g.wrap(i + k);
      double wp = topo ? w[k] * std::pow(arc_mass(ctx, n, i, jp), -spec.tau) : w[k];
      s += wp * rho[jp];
      if (k < half) {
        int jm = g.wrap(i - k);
        double wm = topo ? w[k] * std::pow(arc_mass(ctx, n, i, jm), -spec.tau) : w[k];
        s += wm * rho[jm];
      }
    }
    worst = std::max(worst, s * h);
  }
  return worst;
}

}  // namespace flock
