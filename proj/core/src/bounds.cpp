#include "flock/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "flock/errors.hpp"

namespace flock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double smallness_threshold(const KernelSpec& k, double m0) {
  if (k.variant == KernelVariant::Lipschitz) return lipschitz_norms(k).l1_norm;
  if (k.tau <= k.alpha) return kInf;
  // I(0) = R0^{tau-alpha} / (tau-alpha) in units of lambda^{-1} M0^tau q
  return k.lambda * std::pow(m0, -k.tau) * std::pow(k.r0, k.tau - k.alpha) / (k.tau - k.alpha);
}

}  // namespace

std::string to_string(AmplitudeCase c) {
  switch (c) {
    case AmplitudeCase::Lipschitz: return "lipschitz";
    case AmplitudeCase::TauBelowAlpha: return "tau_below_alpha";
    case AmplitudeCase::TauEqualsAlpha: return "tau_equals_alpha";
    case AmplitudeCase::TauBetween: return "tau_between";
    case AmplitudeCase::TauAboveAlphaPlusOne: return "tau_above_alpha_plus_one";
  }
  return "?";
}

AmplitudeCase classify_amplitude_case(const KernelSpec& kernel) {
  if (kernel.variant == KernelVariant::Lipschitz) return AmplitudeCase::Lipschitz;
  if (kernel.tau < kernel.alpha) return AmplitudeCase::TauBelowAlpha;
  if (kernel.tau == kernel.alpha) return AmplitudeCase::TauEqualsAlpha;
  if (kernel.tau < kernel.alpha + 1.0) return AmplitudeCase::TauBetween;
  return AmplitudeCase::TauAboveAlphaPlusOne;
}

double logistic_envelope(double a, double b, double x0, double t) {
  if (a <= 0.0 || b <= 0.0 || x0 <= 0.0)
    throw DomainError("logistic_envelope: parameters must be positive");
  return b * x0 / (x0 + (b - x0) * std::exp(-a * b * t));
}

double logistic_envelope(const LogisticEnvelope& env, double t) {
  return logistic_envelope(env.rate_factor, env.carrying_capacity, env.x0, t);
}

SmallnessStatus check_smallness(const KernelSpec& kernel, double m0, double sup_q0,
                                double inf_q0) {
  SmallnessStatus s;
  s.value = sup_q0;
  s.threshold = smallness_threshold(kernel, m0);
  s.required = std::isfinite(s.threshold);
  s.satisfied = sup_q0 < s.threshold;
  s.margin = s.threshold - sup_q0;
  // Relaxed form: only a lower bound on q0 is needed, i.e. -inf q0 < threshold.
  s.relaxed_threshold = s.threshold;
  s.relaxed_satisfied = -inf_q0 < s.threshold;
  return s;
}

AmplitudeBound density_amplitude_bound(const KernelSpec& kernel, double m0, double sup_q0) {
  AmplitudeBound out;
  out.amp_case = classify_amplitude_case(kernel);
  out.smallness = check_smallness(kernel, m0, sup_q0, -sup_q0);
  if (out.smallness.required && !out.smallness.satisfied)
    throw SmallnessViolation("density_amplitude_bound: sup|q0| = " + fmt(sup_q0) +
                                 " must be below the threshold " + fmt(out.smallness.threshold),
                             sup_q0, out.smallness.threshold);

  const double lam = kernel.lambda, r0 = kernel.r0, a = kernel.alpha, t = kernel.tau;
  switch (out.amp_case) {
    case AmplitudeCase::Lipschitz: {
      KernelNorms n = lipschitz_norms(kernel);
      out.sup_bound = n.linf_norm * m0 / (n.l1_norm - sup_q0);
      out.rate_factor = n.l1_norm - sup_q0;
      break;
    }
    case AmplitudeCase::TauBelowAlpha: {
      double r = std::pow(
          (1.0 + a - t) * ((a - t) * std::pow(m0, t) * sup_q0 / lam + std::pow(r0, t - a)),
          -1.0 / (a - t));
      out.r_opt = r;
      out.sup_bound = (1.0 + a - t) * m0 / r;
      out.rate_factor = lam * std::pow(m0, -t) * std::pow(r, t - a) / (1.0 + a - t);
      break;
    }
    case AmplitudeCase::TauEqualsAlpha: {
      double r = r0 * std::exp(-1.0 - std::pow(m0, t) * sup_q0 / lam);
      out.r_opt = r;
      out.sup_bound = m0 / r;  // (1 + a - t) = 1 here
      out.rate_factor = lam * std::pow(m0, -t);
      break;
    }
    case AmplitudeCase::TauBetween: {
      double core = std::pow(r0, t - a) - (t - a) * std::pow(m0, t) * sup_q0 / lam;
      double r = std::pow((1.0 + a - t) * core, 1.0 / (t - a));
      out.r_opt = r;
      out.sup_bound = (1.0 + a - t) * m0 / r;
      out.rate_factor = lam * std::pow(m0, -t) * std::pow(r, t - a) / (1.0 + a - t);
      break;
    }
    case AmplitudeCase::TauAboveAlphaPlusOne: {
      double core = std::pow(r0, t - a) - (t - a) * std::pow(m0, t) * sup_q0 / lam;
      out.sup_bound = (t - a) * std::pow(r0, t - 1.0 - a) * m0 / core;
      out.rate_factor = std::pow(m0, -t) * lam * core / (t - a);
      break;
    }
  }
  return out;
}

double theorem1_rate(const KernelSpec& kernel, double m0, double rho0_sup) {
  double eta = kernel.singular() ? std::min(kernel.tau, 1.0 + kernel.alpha) : 0.0;
  double psi_lower = psi_lower_bound(kernel, rho0_sup, m0, eta);
  PoincareConstant pc = poincare_constant(kernel.lower_bound_radius(), 256);
  return pc.c_rigorous * (m0 / kTwoPi) * psi_lower;
}

double theorem2_bound(const KernelNorms& norms, double m0, double sup_q0, double lambda,
                      double c_r0) {
  if (sup_q0 >= norms.l1_norm)
    throw SmallnessViolation("theorem2_bound: sup|q0| = " + fmt(sup_q0) +
                                 " must be below ||psi||_L1 = " + fmt(norms.l1_norm),
                             sup_q0, norms.l1_norm);
  return m0 * sup_q0 * norms.linf_norm / (lambda * c_r0 * (norms.l1_norm - sup_q0));
}

double theorem3_bound_eta(const KernelSpec& kernel, double m0, double sup_q0, double eta) {
  if (!kernel.singular())
    throw VariantError("theorem3_bound: singular kernel required");
  double eta_max = std::min(kernel.tau, 1.0 + kernel.alpha);
  if (eta < 0.0 || eta > eta_max + 1e-12)
    throw DomainError("theorem3_bound: eta must lie in [0, min(tau, 1+alpha)]");
  AmplitudeBound amp = density_amplitude_bound(kernel, m0, sup_q0);
  PoincareConstant pc = poincare_constant(kernel.r0, 256);
  return std::pow(m0, eta) * std::pow(kernel.r0, 1.0 + kernel.alpha - eta) * sup_q0 /
         (kernel.lambda * pc.c_rigorous) * std::pow(amp.sup_bound, 1.0 + kernel.tau - eta);
}

double theorem3_bound(const KernelSpec& kernel, double m0, double sup_q0) {
  double eta = kernel.tau < 1.0 + kernel.alpha ? kernel.tau : 1.0 + kernel.alpha;
  return theorem3_bound_eta(kernel, m0, sup_q0, eta);
}

BoundReport make_bound_report(const KernelSpec& kernel, double m0, double rho0_sup,
                              double sup_q0, double inf_q0, bool e0_zero) {
  BoundReport rep;
  rep.kernel = kernel;
  rep.m0 = m0;
  rep.rho0_sup = rho0_sup;
  rep.sup_q0 = sup_q0;
  rep.inf_q0 = inf_q0;
  rep.e0_zero = e0_zero;
  rep.smallness = check_smallness(kernel, m0, sup_q0, inf_q0);
  rep.amp_case = classify_amplitude_case(kernel);
  rep.theorem1_rate_value = theorem1_rate(kernel, m0, rho0_sup);
  rep.poincare = poincare_constant(kernel.lower_bound_radius(), 256);

  AmplitudeBound amp = density_amplitude_bound(kernel, m0, sup_q0);
  rep.density_amp_bound = amp.sup_bound;
  rep.optimal_r = amp.r_opt;
  rep.logistic = {amp.rate_factor, amp.sup_bound, rho0_sup};
  if (kernel.variant == KernelVariant::Lipschitz) {
    rep.norms = lipschitz_norms(kernel);
    rep.theorem2_l1_bound =
        theorem2_bound(*rep.norms, m0, sup_q0, kernel.lambda, rep.poincare.c_rigorous);
  } else {
    rep.theorem3_l1_bound = theorem3_bound(kernel, m0, sup_q0);
  }
  return rep;
}

bool CheckSummary::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

DecayFit fit_decay_rate(const Trajectory& traj) {
  DecayFit fit;
  std::vector<double> ts, ys;
  for (const auto& s : traj.snapshots) {
    double l1 = s.diag.l1_dev;
    if (l1 >= 1e-6 && l1 <= 1e-1) {
      ts.push_back(s.diag.time);
      ys.push_back(std::log(l1));
    }
  }
  fit.points = static_cast<int>(ts.size());
  if (fit.points < 3) return fit;
  double n = fit.points, st = 0, sy = 0, stt = 0, sty = 0;
  for (int i = 0; i < fit.points; ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  double slope = (n * sty - st * sy) / (n * stt - st * st);
  double intercept = (sy - slope * st) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (int i = 0; i < fit.points; ++i) {
    double pred = intercept + slope * ts[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.rate = -slope;
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

CheckSummary check_trajectory(const Trajectory& traj, const BoundReport& report,
                              double tail_fraction) {
  CheckSummary summary;
  if (traj.snapshots.empty()) throw InsufficientTailError("check_trajectory: empty trajectory");
  double t_final = traj.snapshots.back().diag.time;
  double t_tail = t_final * (1.0 - tail_fraction);
  double tail_l1 = 0.0, tail_sup_rho = 0.0;
  int tail_count = 0;
  for (const auto& s : traj.snapshots) {
    if (s.diag.time >= t_tail) {
      tail_l1 = std::max(tail_l1, s.diag.l1_dev);
      tail_sup_rho = std::max(tail_sup_rho, s.diag.sup_rho);
      ++tail_count;
    }
  }
  if (tail_count < 20)
    throw InsufficientTailError("check_trajectory: tail window has " +
                                std::to_string(tail_count) + " snapshots, need >= 20");

  auto add = [&](const std::string& name, bool pass, double observed, double bound,
                 const std::string& detail) {
    summary.checks.push_back({name, pass, observed, bound, detail});
  };

  if (report.e0_zero) {
    DecayFit fit = fit_decay_rate(traj);
    if (fit.points >= 5) {
      bool ok = fit.rate >= report.theorem1_rate_value && fit.r_squared >= 0.98;
      add("theorem1_decay_rate", ok, fit.rate, report.theorem1_rate_value,
          "fitted rate vs guaranteed rate; R^2 = " + fmt(fit.r_squared) + " over " +
              std::to_string(fit.points) + " points");
    } else {
      // no decay window: the density never left the fit band, e.g. an
      // equilibrium start; require the tail to sit at the uniform state
      add("theorem1_decay_rate", tail_l1 <= 1e-6, tail_l1, 1e-6,
          "no usable decay window; tail-max of l1_dev vs the uniform-state floor");
    }
  } else {
    double l1_bound = report.theorem2_l1_bound   ? *report.theorem2_l1_bound
                      : report.theorem3_l1_bound ? *report.theorem3_l1_bound
                                                 : kInf;
    add("l1_disorder_bound", tail_l1 <= l1_bound, tail_l1, l1_bound,
        "tail-max of ||rho - rho_bar||_L1 vs the limsup bound");
  }

  add("density_amplitude_bound", tail_sup_rho <= report.density_amp_bound * 1.05, tail_sup_rho,
      report.density_amp_bound, "tail-max of sup rho vs the limsup bound B (5% tolerance)");

  bool env_ok = true;
  double worst_ratio = 0.0;
  for (const auto& s : traj.snapshots) {
    double env = logistic_envelope(report.logistic, s.diag.time);
    worst_ratio = std::max(worst_ratio, s.diag.sup_rho / env);
    if (s.diag.sup_rho > env * 1.05) env_ok = false;
  }
  add("logistic_envelope", env_ok, worst_ratio, 1.05,
      "max over time of sup_rho / envelope (5% tolerance)");

  return summary;
}

}  // namespace flock
