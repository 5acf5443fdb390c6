#include "flock/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flock/errors.hpp"
#include "kernel_detail.hpp"

namespace flock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

Field compute_e(const FlockState& state, const KernelSpec& kernel) {
  Field e = periodic_derivative(state.u);
  Field lp = l_psi(kernel, state.rho, state.rho);
  for (int i = 0; i < e.size(); ++i) e[i] += lp[i];
  return e;
}

Field compute_q(const FlockState& state, const KernelSpec& kernel) {
  if (state.rho.min() <= 0.0) throw SingularityError("compute_q: density must be positive");
  Field q = compute_e(state, kernel);
  for (int i = 0; i < q.size(); ++i) q[i] /= state.rho[i];
  return q;
}

double entropy(const Field& rho) {
  if (rho.min() <= 0.0) throw SingularityError("entropy: density must be positive");
  double rho_bar = integrate(rho) / kTwoPi;
  double h = 0.0;
  for (double r : rho.values()) h += r * std::log(r / rho_bar);
  h *= rho.grid().dx();
  if (std::abs(h) <= 1e-14) h = 0.0;
  return h;
}

CkBracket ck_bracket(const Field& rho) {
  double rho_bar = integrate(rho) / kTwoPi;
  double l1 = 0.0, l2 = 0.0;
  for (double r : rho.values()) {
    l1 += std::abs(r - rho_bar);
    l2 += (r - rho_bar) * (r - rho_bar);
  }
  l1 *= rho.grid().dx();
  l2 *= rho.grid().dx();
  CkBracket b{l1 * l1 / (4.0 * kPi), rho_bar * entropy(rho), l2};
  double tol = 1e-10 * std::max(1.0, b.upper);
  if (b.lower > b.middle + tol || b.middle > b.upper + tol)
    throw InvariantError("ck_bracket: Csiszar-Kullback chain violated");
  return b;
}

double dissipation(const Field& rho, const KernelSpec& kernel) {
  const auto& g = rho.grid();
  const int n = g.n_cells();
  const int half = n / 2;
  const double h = g.dx();
  std::vector<double> w = detail::offset_weights(kernel, g);
  const bool topo = kernel.variant == KernelVariant::Topological;
  detail::TopoContext ctx;
  if (topo) ctx = detail::make_topo_context(rho);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k <= half; ++k) {
      if (w[k] == 0.0) continue;
      int jp = g.wrap(i + k);
      double d = rho[jp] - rho[i];
      double wk = topo ? w[k] * std::pow(detail::arc_mass(ctx, n, i, jp), -kernel.tau) : w[k];
      // each unordered pair appears twice over (i, k <= n/2) except k = n/2
      s += (k == half ? 0.5 : 1.0) * wk * d * d;
    }
  }
  s *= h * h;  // (1/2) * sum over ordered pairs, each counted twice
  if (kernel.singular()) {
    // near-diagonal sliver: int_{|z|<h/2} psi z^2 rho'(x)^2 per cell
    for (int i = 0; i < n; ++i) {
      double dr = (rho[g.wrap(i + 1)] - rho[g.wrap(i - 1)]) / (2.0 * h);
      s += detail::diagonal_coeff(kernel, rho[i], h) * dr * dr * h;
    }
  }
  return s;
}

PoincareConstant poincare_constant(double r0, int k_max) {
  if (r0 <= 0.0 || r0 > kPi + 1e-12)
    throw DomainError("poincare_constant: r0 must lie in (0, pi]");
  if (k_max < 64) throw DomainError("poincare_constant: k_max must be >= 64");
  // Trapezoidal cutoff = convolution of boxes of half-widths 3r0/4 and r0/4,
  // normalized to unit integral: chi_hat(k) = sinc(3 r0 k / 4) sinc(r0 k / 4).
  double max_mod = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    double m = std::abs(sinc(0.75 * r0 * k) * sinc(0.25 * r0 * k));
    max_mod = std::max(max_mod, m);
  }
  double tail = 16.0 / (3.0 * r0 * r0 * (k_max + 1.0) * (k_max + 1.0));
  if (tail >= max_mod)
    throw TailError("poincare_constant: k_max too small to certify the spectral maximum");
  double eps = 1.0 - max_mod;
  if (eps <= 0.0 || eps > 1.0)
    throw InvariantError("poincare_constant: epsilon outside (0, 1]");
  return {r0, eps, 2.0 * eps * eps, 0.5 * eps * eps};
}

bool dissipation_lower_check(const Field& rho, const KernelSpec& kernel) {
  double d = dissipation(rho, kernel);
  double eta = kernel.singular() ? std::min(kernel.tau, 1.0 + kernel.alpha) : 0.0;
  double psi_lower = psi_lower_bound(kernel, rho.max(), integrate(rho), eta);
  PoincareConstant pc = poincare_constant(kernel.lower_bound_radius(), 256);
  CkBracket b = ck_bracket(rho);
  double bound = pc.c_rigorous * psi_lower * b.upper;
  if (d + 1e-10 * std::max(1.0, bound) < bound)
    throw InvariantError("dissipation_lower_check: dissipation below the certified bound");
  return true;
}

DiagnosticsRecord snapshot_diagnostics(const FlockState& state, const KernelSpec& kernel) {
  const Field& rho = state.rho;
  const Field& u = state.u;
  DiagnosticsRecord rec;
  rec.time = state.time;
  rec.mass = integrate(rho);
  rec.mean_density = rec.mass / kTwoPi;
  {
    Field ru(rho.grid_ptr());
    for (int i = 0; i < ru.size(); ++i) ru[i] = rho[i] * u[i];
    rec.momentum = integrate(ru);
  }
  rec.entropy = entropy(rho);
  double l1 = 0.0, l2 = 0.0;
  for (double r : rho.values()) {
    l1 += std::abs(r - rec.mean_density);
    l2 += (r - rec.mean_density) * (r - rec.mean_density);
  }
  rec.l1_dev = l1 * rho.grid().dx();
  rec.l2_dev_sq = l2 * rho.grid().dx();
  rec.sup_rho = rho.max();
  Field q = compute_q(state, kernel);
  rec.sup_q = q.max_abs();
  Field e(rho.grid_ptr());
  for (int i = 0; i < e.size(); ++i) e[i] = rho[i] * q[i];
  rec.e_integral = integrate(e);
  rec.dissipation = dissipation(rho, kernel);
  Field cross(rho.grid_ptr());
  for (int i = 0; i < cross.size(); ++i)
    cross[i] = (rho[i] - rec.mean_density) * rho[i] * q[i];
  rec.cross_term = integrate(cross);
  return rec;
}

double entropy_balance_residual(const DiagnosticsRecord& prev, const DiagnosticsRecord& mid,
                                const DiagnosticsRecord& next) {
  double dt = next.time - prev.time;
  if (dt <= 0.0) throw DomainError("entropy_balance_residual: snapshots not time-ordered");
  double dhdt = (next.entropy - prev.entropy) / dt;
  double res = std::abs(dhdt + mid.cross_term + mid.dissipation);
  return res / std::max({std::abs(dhdt), mid.dissipation, 1e-14});
}

void validate_record(const DiagnosticsRecord& rec) {
  if (!(rec.mass > 0.0)) throw InvariantError("record: mass must be positive");
  if (rec.entropy < -1e-12 * std::max(1.0, rec.mass))
    throw InvariantError("record: negative entropy");
  double middle = 4.0 * kPi * rec.mean_density * rec.entropy;
  double upper = 4.0 * kPi * rec.l2_dev_sq;
  double tol = 1e-10 * std::max(1.0, upper);
  if (rec.l1_dev * rec.l1_dev > middle + tol || middle > upper + tol)
    throw InvariantError("record: Csiszar-Kullback chain violated");
}

}  // namespace flock
