#include <cmath>
#include <numbers>

#include "doctest.h"
#include "flock/bounds.hpp"
#include "flock/diagnostics.hpp"
#include "flock/errors.hpp"

using namespace flock;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

KernelSpec lip(double lambda = 1.0, double r0 = 1.0) {
  KernelSpec k;
  k.lambda = lambda;
  k.r0 = r0;
  return k;
}

KernelSpec geo(double alpha, double lambda = 1.0, double r0 = 1.0) {
  KernelSpec k;
  k.variant = KernelVariant::Geometric;
  k.alpha = alpha;
  k.lambda = lambda;
  k.r0 = r0;
  return k;
}

KernelSpec topo(double alpha, double tau, double lambda = 1.0, double r0 = 1.0) {
  KernelSpec k;
  k.variant = KernelVariant::Topological;
  k.alpha = alpha;
  k.tau = tau;
  k.lambda = lambda;
  k.r0 = r0;
  return k;
}

}  // namespace

TEST_CASE("amplitude case classification is a function of (alpha, tau)") {
  CHECK(classify_amplitude_case(lip()) == AmplitudeCase::Lipschitz);
  CHECK(classify_amplitude_case(geo(0.5)) == AmplitudeCase::TauBelowAlpha);  // tau = 0 < alpha
  CHECK(classify_amplitude_case(topo(0.5, 0.2)) == AmplitudeCase::TauBelowAlpha);
  CHECK(classify_amplitude_case(topo(0.5, 0.5)) == AmplitudeCase::TauEqualsAlpha);
  CHECK(classify_amplitude_case(topo(0.5, 0.8)) == AmplitudeCase::TauBetween);
  CHECK(classify_amplitude_case(topo(0.5, 1.5)) == AmplitudeCase::TauAboveAlphaPlusOne);
  CHECK(classify_amplitude_case(topo(0.5, 1.6)) == AmplitudeCase::TauAboveAlphaPlusOne);
  CHECK(to_string(AmplitudeCase::TauBetween) == "tau_between");
}

TEST_CASE("logistic envelope: limits, monotonicity, domain") {
  // X' <= A X (B - X): starting at B stays at B; below B grows toward B.
  CHECK(logistic_envelope(2.0, 3.0, 3.0, 10.0) == doctest::Approx(3.0));
  CHECK(logistic_envelope(2.0, 3.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(logistic_envelope(2.0, 3.0, 1.0, 1e3) == doctest::Approx(3.0).epsilon(1e-10));
  double prev = 1.0;
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    double v = logistic_envelope(2.0, 3.0, 1.0, t);
    CHECK(v > prev);
    CHECK(v < 3.0);
    prev = v;
  }
  // Closed form at one point: B X0 / (X0 + (B - X0) e^{-A B t}).
  double expect = 3.0 * 1.0 / (1.0 + 2.0 * std::exp(-6.0 * 0.5));
  CHECK(logistic_envelope(2.0, 3.0, 1.0, 0.5) == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(logistic_envelope(-1.0, 3.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(logistic_envelope(1.0, 0.0, 1.0, 0.5), DomainError);
}

TEST_CASE("smallness thresholds by case") {
  // Lipschitz: sup|q0| < ||psi||_L1 = 1.5 for the unit plateau.
  SmallnessStatus s = check_smallness(lip(), kTwoPi, 0.1, -0.1);
  CHECK(s.required);
  CHECK(s.threshold == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(s.satisfied);

  // tau <= alpha: no smallness needed.
  s = check_smallness(topo(0.5, 0.5), kTwoPi, 100.0, -100.0);
  CHECK(!s.required);
  CHECK(s.satisfied);

  // tau > alpha: lambda m0^{-tau} r0^{tau-alpha} / (tau - alpha).
  s = check_smallness(topo(0.5, 0.8), kTwoPi, 0.1, -0.1);
  CHECK(s.required);
  CHECK(s.threshold == doctest::Approx(std::pow(kTwoPi, -0.8) / 0.3).epsilon(1e-12));
  CHECK(s.threshold == doctest::Approx(0.7661871263).epsilon(1e-8));

  s = check_smallness(topo(0.5, 1.6), kTwoPi, 0.1, -0.1);
  CHECK(s.threshold == doctest::Approx(0.04803076739).epsilon(1e-8));
  CHECK(!s.satisfied);
  CHECK(s.margin < 0.0);
}

TEST_CASE("relaxed smallness uses only the lower tail of q0") {
  // sup|q0| over threshold but -inf q0 under it: strict fails, relaxed holds.
  SmallnessStatus s = check_smallness(topo(0.5, 0.8), kTwoPi, 1.0, -0.5);
  CHECK(!s.satisfied);
  CHECK(s.relaxed_satisfied);
  CHECK(s.relaxed_threshold == doctest::Approx(s.threshold));
  s = check_smallness(topo(0.5, 0.8), kTwoPi, 1.0, -0.9);
  CHECK(!s.relaxed_satisfied);
}

TEST_CASE("density amplitude bound: Lipschitz closed form") {
  // B = ||psi||_inf M0 / (||psi||_L1 - sup q0); q0 = 0 gives 2 pi / 1.5 = 4 pi / 3.
  AmplitudeBound b = density_amplitude_bound(lip(), kTwoPi, 0.0);
  CHECK(b.amp_case == AmplitudeCase::Lipschitz);
  CHECK(b.sup_bound == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-6));
  CHECK(b.rate_factor == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(!b.r_opt.has_value());

  AmplitudeBound b2 = density_amplitude_bound(lip(), kTwoPi, 0.5);
  CHECK(b2.sup_bound == doctest::Approx(kTwoPi / 1.0).epsilon(1e-6));
  CHECK_THROWS_AS(density_amplitude_bound(lip(), kTwoPi, 2.0), SmallnessViolation);
}

TEST_CASE("density amplitude bound: tau below alpha frozen values") {
  // Geometric alpha = 0.5, lambda = 1, r0 = 1, M0 = 2 pi, sup q0 = 0.1.
  AmplitudeBound b = density_amplitude_bound(geo(0.5), kTwoPi, 0.1);
  CHECK(b.amp_case == AmplitudeCase::TauBelowAlpha);
  REQUIRE(b.r_opt.has_value());
  CHECK(*b.r_opt == doctest::Approx(0.4031242126).epsilon(1e-9));
  CHECK(b.sup_bound == doctest::Approx(23.37933983).epsilon(1e-9));
  // Optimal radius stays inside the support.
  CHECK(*b.r_opt <= 1.0);
}

TEST_CASE("density amplitude bound: tau equals alpha matches the case limit") {
  // tau -> alpha limit of the tau < alpha family agrees with the tau = alpha
  // closed form r = r0 exp(-1 - q M0^tau / lambda).
  double q = 0.1;
  AmplitudeBound eq = density_amplitude_bound(topo(0.5, 0.5), kTwoPi, q);
  double r_expect = std::exp(-1.0 - q * std::pow(kTwoPi, 0.5));
  REQUIRE(eq.r_opt.has_value());
  CHECK(*eq.r_opt == doctest::Approx(r_expect).epsilon(1e-12));
  CHECK(eq.sup_bound == doctest::Approx(kTwoPi / r_expect).epsilon(1e-12));

  AmplitudeBound below = density_amplitude_bound(topo(0.5, 0.4999999), kTwoPi, q);
  CHECK(below.sup_bound == doctest::Approx(eq.sup_bound).epsilon(1e-4));

  AmplitudeBound above = density_amplitude_bound(topo(0.5, 0.5000001), kTwoPi, q);
  CHECK(above.sup_bound == doctest::Approx(eq.sup_bound).epsilon(1e-4));
}

TEST_CASE("density amplitude bound: tau above alpha + 1 has no optimal radius") {
  AmplitudeBound b = density_amplitude_bound(topo(0.5, 1.6), kTwoPi, 0.02);
  CHECK(b.amp_case == AmplitudeCase::TauAboveAlphaPlusOne);
  CHECK(!b.r_opt.has_value());
  CHECK(b.sup_bound > 0.0);
  CHECK(b.rate_factor > 0.0);

  // Over threshold: rejected with the threshold attached.
  try {
    density_amplitude_bound(topo(0.5, 1.6), kTwoPi, 0.06);
    FAIL("expected SmallnessViolation");
  } catch (const SmallnessViolation& e) {
    CHECK(e.value == doctest::Approx(0.06));
    CHECK(e.threshold == doctest::Approx(0.04803076739).epsilon(1e-8));
  }
}

TEST_CASE("amplitude bound decreases as smallness margin grows") {
  double prev = 1e300;
  for (double q : {0.3, 0.2, 0.1, 0.0}) {
    double b = density_amplitude_bound(geo(0.5), kTwoPi, q).sup_bound;
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("theorem 1 rate composes the Poincare constant and the kernel floor") {
  // Lipschitz lambda = 1, r0 = pi: guaranteed radius pi/2, rho_bar = 1,
  // psi floor = lambda, so rate = c_rigorous(pi/2).
  KernelSpec k = lip(1.0, kPi);
  double rate = theorem1_rate(k, kTwoPi, 1.5);
  double c = poincare_constant(kPi / 2.0, 256).c_rigorous;
  CHECK(rate == doctest::Approx(c).epsilon(1e-12));
  CHECK(rate == doctest::Approx(0.0277980).epsilon(1e-3));

  // Topological tau <= 1 + alpha: floor is density-independent with eta = tau.
  KernelSpec t = topo(0.5, 0.5);
  double floor = std::pow(kTwoPi, -0.5);  // lambda r0^{tau-1-alpha} m0^{-tau}
  double ct = poincare_constant(1.0, 256).c_rigorous;
  CHECK(theorem1_rate(t, kTwoPi, 99.0) == doctest::Approx(ct * floor).epsilon(1e-12));
  // and is then independent of the density sup.
  CHECK(theorem1_rate(t, kTwoPi, 2.0) == doctest::Approx(theorem1_rate(t, kTwoPi, 99.0)));

  // Mass scaling: rho_bar = m0 / 2 pi multiplies the rate for Lipschitz.
  CHECK(theorem1_rate(k, 2.0 * kTwoPi, 1.5) == doctest::Approx(2.0 * rate).epsilon(1e-12));
}

TEST_CASE("theorem 2 bound: closed form and smallness guard") {
  KernelNorms norms{kTwoPi, 1.0};
  CHECK(theorem2_bound(norms, kTwoPi, kPi, 1.0, 0.1) == doctest::Approx(20.0 * kPi).epsilon(1e-12));
  CHECK_THROWS_AS(theorem2_bound(norms, kTwoPi, kTwoPi, 1.0, 0.1), SmallnessViolation);
  // Bound grows as q0 approaches the L1 norm.
  double prev = 0.0;
  for (double q : {0.5, 2.0, 5.0, 6.0}) {
    double b = theorem2_bound(norms, kTwoPi, q, 1.0, 0.1);
    CHECK(b > prev);
    prev = b;
  }
}

TEST_CASE("theorem 3 bound: frozen composite value and recomposition") {
  KernelSpec k = geo(0.5);
  double q = 0.1;
  double bound = theorem3_bound(k, kTwoPi, q);

  // Recompose from the reported pieces: eta = tau = 0 here.
  double c = poincare_constant(1.0, 256).c_rigorous;
  double b_amp = density_amplitude_bound(k, kTwoPi, q).sup_bound;
  double expect = q / c * b_amp;  // M0^0 r0^{1.5} = 1
  CHECK(bound == doctest::Approx(expect).epsilon(1e-12));
  CHECK(bound == doctest::Approx(462.1546235).epsilon(1e-3));

  CHECK_THROWS_AS(theorem3_bound(lip(), kTwoPi, 0.1), VariantError);
}

TEST_CASE("theorem 3 eta family: continuity at the default choice, domain guard") {
  KernelSpec k = topo(0.5, 0.5);
  double q = 0.05;
  double at_tau = theorem3_bound_eta(k, kTwoPi, q, 0.5);
  CHECK(theorem3_bound(k, kTwoPi, q) == doctest::Approx(at_tau).epsilon(1e-12));
  double nearby = theorem3_bound_eta(k, kTwoPi, q, 0.499999);
  CHECK(nearby == doctest::Approx(at_tau).epsilon(1e-4));
  CHECK_THROWS_AS(theorem3_bound_eta(k, kTwoPi, q, 0.6), DomainError);
  CHECK_THROWS_AS(theorem3_bound_eta(k, kTwoPi, q, -0.1), DomainError);

  // tau >= 1 + alpha pins eta to 1 + alpha.
  KernelSpec above = topo(0.5, 1.6);
  CHECK(theorem3_bound(above, kTwoPi, 0.02) ==
        doctest::Approx(theorem3_bound_eta(above, kTwoPi, 0.02, 1.5)).epsilon(1e-12));
}

TEST_CASE("make_bound_report composes the per-kernel summary") {
  BoundReport r = make_bound_report(lip(), kTwoPi, 1.5, 0.1, -0.1, false);
  CHECK(r.m0 == doctest::Approx(kTwoPi));
  CHECK(r.amp_case == AmplitudeCase::Lipschitz);
  CHECK(r.theorem2_l1_bound.has_value());
  CHECK(!r.theorem3_l1_bound.has_value());
  REQUIRE(r.norms.has_value());
  CHECK(r.norms->l1_norm == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.logistic.carrying_capacity == doctest::Approx(r.density_amp_bound));
  CHECK(r.logistic.x0 == doctest::Approx(1.5));
  CHECK(r.poincare.r0 == doctest::Approx(0.5));  // plateau radius of the default profile
  CHECK(r.theorem1_rate_value > 0.0);

  BoundReport r3 = make_bound_report(geo(0.5), kTwoPi, 1.5, 0.1, -0.1, false);
  CHECK(!r3.theorem2_l1_bound.has_value());
  REQUIRE(r3.theorem3_l1_bound.has_value());
  CHECK(*r3.theorem3_l1_bound == doctest::Approx(462.1546235).epsilon(1e-3));
  CHECK(r3.poincare.r0 == doctest::Approx(1.0));
}

TEST_CASE("fit_decay_rate recovers a synthetic exponential") {
  Trajectory traj;
  for (int m = 0; m <= 80; ++m) {
    Snapshot s;
    s.diag.time = 0.5 * m;
    s.diag.l1_dev = 1e-2 * std::exp(-0.3 * s.diag.time);
    traj.snapshots.push_back(s);
  }
  DecayFit fit = fit_decay_rate(traj);
  CHECK(fit.rate == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.points >= 5);
}
