#include <cmath>
#include <numbers>

#include "doctest.h"
#include "flock/errors.hpp"
#include "flock/grid.hpp"
#include "flock/kernels.hpp"

using namespace flock;

namespace {

constexpr double kPi = std::numbers::pi;

KernelSpec lip(double lambda = 1.0, double r0 = 1.0) {
  KernelSpec k;
  k.variant = KernelVariant::Lipschitz;
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

Field cosine_density(const GridPtr& g, double amp) {
  Field rho(g);
  for (int i = 0; i < g->n_cells(); ++i) rho[i] = 1.0 + amp * std::cos(g->center(i));
  return rho;
}

}  // namespace

TEST_CASE("kernel validation rejects out-of-domain parameters") {
  KernelSpec k = lip();
  CHECK_NOTHROW(k.validate());
  k.lambda = 0.0;
  CHECK_THROWS_AS(k.validate(), DomainError);
  k = lip(1.0, 4.0);  // r0 > pi
  CHECK_THROWS_AS(k.validate(), DomainError);

  KernelSpec geo;
  geo.variant = KernelVariant::Geometric;
  geo.alpha = 2.0;  // must be in (0, 2)
  CHECK_THROWS_AS(geo.validate(), DomainError);
  geo.alpha = 0.5;
  CHECK_NOTHROW(geo.validate());
  geo.tau = 0.3;  // geometric kernels carry no topological weight
  CHECK_THROWS_AS(geo.validate(), DomainError);

  KernelSpec t = topo(0.5, -0.1);
  CHECK_THROWS_AS(t.validate(), DomainError);

  KernelSpec custom = lip();
  custom.lipschitz_profile = LipschitzProfile{[](double) { return 0.5; }, 0.5};
  CHECK_THROWS_AS(custom.validate(), DomainError);  // below lambda inside guarantee
  custom.lipschitz_profile = LipschitzProfile{[](double) { return 1.0; }, 0.5};
  CHECK_NOTHROW(custom.validate());
}

TEST_CASE("default Lipschitz profile: plateau then linear cutoff") {
  KernelSpec k = lip(2.0, 1.0);
  CHECK(k.profile_value(0.0) == 2.0);
  CHECK(k.profile_value(0.5) == 2.0);
  CHECK(k.profile_value(0.75) == doctest::Approx(1.0));
  CHECK(k.profile_value(1.0) == 0.0);
  CHECK(k.profile_value(2.0) == 0.0);
  CHECK(k.lower_bound_radius() == doctest::Approx(0.5));

  KernelSpec geo;
  geo.variant = KernelVariant::Geometric;
  geo.alpha = 0.5;
  geo.r0 = 0.8;
  CHECK(geo.lower_bound_radius() == doctest::Approx(0.8));
}

TEST_CASE("lipschitz_norms matches the closed form of the plateau profile") {
  // Plateau lambda on [0, r0/2], linear to zero at r0: L1 over the torus is
  // 2 * (lambda r0/2 + lambda r0/4) = 3 lambda r0 / 2.
  KernelNorms n = lipschitz_norms(lip(2.0, 1.0));
  CHECK(n.linf_norm == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(n.l1_norm == doctest::Approx(3.0).epsilon(1e-6));

  n = lipschitz_norms(lip(1.0, 1.0));
  CHECK(n.l1_norm == doctest::Approx(1.5).epsilon(1e-6));

  KernelSpec geo;
  geo.variant = KernelVariant::Geometric;
  geo.alpha = 0.5;
  CHECK_THROWS_AS(lipschitz_norms(geo), VariantError);
}

TEST_CASE("topological_distance: mass of the short arc, symmetric") {
  // n = 260 puts cell centers exactly at +-pi/4; for rho = 1 + 0.5 cos x the
  // short-arc mass between them is pi/2 + sin(pi/4) * 2 * 0.5 = pi/2 + sqrt(2)/2.
  auto g = TorusGrid::make(260);
  Field rho = cosine_density(g, 0.5);
  int i = 97, j = 162;
  REQUIRE(g->center(i) == doctest::Approx(-kPi / 4.0).epsilon(1e-14));
  REQUIRE(g->center(j) == doctest::Approx(kPi / 4.0).epsilon(1e-14));
  double d = topological_distance(rho, i, j);
  CHECK(d == doctest::Approx(2.277903107981444).epsilon(1e-10));
  CHECK(topological_distance(rho, j, i) == d);

  // Antipodal pair on a uniform density carries half the mass either way.
  auto g2 = TorusGrid::make(64);
  Field unif(g2, 1.0);
  CHECK(topological_distance(unif, 0, 32) == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("topological_distance rejects nonpositive densities") {
  auto g = TorusGrid::make(32);
  Field rho(g, 1.0);
  rho[5] = -0.2;
  CHECK_THROWS_AS(topological_distance(rho, 0, 10), SingularityError);
}

TEST_CASE("kernel_value: symmetric, supported on geodesic distance < r0") {
  auto g = TorusGrid::make(128);
  Field rho = cosine_density(g, 0.5);
  KernelSpec k = lip(1.0, 1.0);
  for (int j : {1, 7, 20, 60}) {
    CHECK(kernel_value(k, rho, 3, g->wrap(3 + j)) ==
          doctest::Approx(k.profile_value(g->geodesic(3, g->wrap(3 + j)))));
    CHECK(kernel_value(k, rho, 3, g->wrap(3 + j)) == kernel_value(k, rho, g->wrap(3 + j), 3));
  }
  CHECK(kernel_value(k, rho, 0, 64) == 0.0);  // distance pi > r0

  KernelSpec t = topo(0.5, 0.5);
  CHECK(kernel_value(t, rho, 10, 14) == doctest::Approx(kernel_value(t, rho, 14, 10)));
  CHECK(kernel_value(t, rho, 0, 64) == 0.0);
}

TEST_CASE("l_psi is exactly zero on constants") {
  auto g = TorusGrid::make(64);
  Field rho = cosine_density(g, 0.3);
  Field c(g, 2.5);
  KernelSpec geo;
  geo.variant = KernelVariant::Geometric;
  geo.alpha = 0.7;
  for (const KernelSpec& k : {lip(), geo, topo(0.5, 0.5)})
    CHECK(l_psi(k, rho, c).max_abs() < 1e-14);
}

TEST_CASE("l_psi with a global flat kernel reduces to M0 - 2 pi rho") {
  // Custom profile psi == 1 on all of T: L_psi rho = M0 - 2 pi rho(x).
  auto g = TorusGrid::make(256);
  Field rho = cosine_density(g, 0.5);
  KernelSpec k = lip(1.0, kPi);
  k.lipschitz_profile = LipschitzProfile{[](double) { return 1.0; }, kPi};
  Field out = l_psi(k, rho, rho);
  double m0 = integrate(rho);
  for (int i = 0; i < 256; ++i) {
    double exact = m0 - 2.0 * kPi * rho[i];
    CHECK(out[i] == doctest::Approx(exact).epsilon(5e-5));
  }
}

TEST_CASE("l_psi integrates to zero for every variant") {
  auto g = TorusGrid::make(128);
  Field rho = cosine_density(g, 0.4);
  KernelSpec geo;
  geo.variant = KernelVariant::Geometric;
  geo.alpha = 0.5;
  for (const KernelSpec& k : {lip(), geo, topo(0.5, 0.5), topo(0.5, 1.6)}) {
    Field out = l_psi(k, rho, rho);
    CHECK(std::abs(integrate(out)) < 1e-13);
  }
}

TEST_CASE("alignment_force satisfies force = L_psi(rho u) - u L_psi(rho) exactly") {
  auto g = TorusGrid::make(96);
  Field rho = cosine_density(g, 0.5);
  Field u(g);
  for (int i = 0; i < 96; ++i) u[i] = 0.3 * std::sin(g->center(i)) + 0.1;
  Field ru(g);
  for (int i = 0; i < 96; ++i) ru[i] = rho[i] * u[i];

  KernelSpec geo;
  geo.variant = KernelVariant::Geometric;
  geo.alpha = 1.2;
  for (const KernelSpec& k : {lip(), geo, topo(0.5, 0.5), topo(0.3, 1.1)}) {
    Field f = alignment_force(k, rho, u);
    Field lhs_a = l_psi(k, rho, ru);
    Field lhs_b = l_psi(k, rho, rho);
    double scale = std::max(1.0, f.max_abs());
    for (int i = 0; i < 96; ++i)
      CHECK(std::abs(f[i] - (lhs_a[i] - u[i] * lhs_b[i])) < 1e-10 * scale);
  }
}

TEST_CASE("psi_lower_bound: Lipschitz plateau and the eta family") {
  CHECK(psi_lower_bound(lip(2.0), 5.0, 2.0 * kPi, 0.0) == 2.0);

  // lambda / (r0^{1+alpha-eta} m0^eta rho_sup^{tau-eta})
  KernelSpec t = topo(0.5, 2.0);
  double v = psi_lower_bound(t, 2.0, 2.0 * kPi, 1.5);
  CHECK(v == doctest::Approx(1.0 / (std::pow(2.0 * kPi, 1.5) * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(v == doctest::Approx(0.0448967).epsilon(1e-4));

  CHECK_THROWS_AS(psi_lower_bound(t, 2.0, 2.0 * kPi, 1.6), DomainError);   // > min(tau, 1+alpha)
  CHECK_THROWS_AS(psi_lower_bound(t, 2.0, 2.0 * kPi, -0.1), DomainError);

  // eta = tau gives the density-independent bound lambda r0^{tau-1-alpha} m0^{-tau}.
  KernelSpec t2 = topo(0.5, 0.5);
  double expect = 1.0 * std::pow(1.0, 0.5 - 1.5) * std::pow(2.0 * kPi, -0.5);
  CHECK(psi_lower_bound(t2, 123.0, 2.0 * kPi, 0.5) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("max_row_sum of the global flat kernel is close to the total mass") {
  auto g = TorusGrid::make(128);
  Field rho = cosine_density(g, 0.5);
  KernelSpec k = lip(1.0, kPi);
  k.lipschitz_profile = LipschitzProfile{[](double) { return 1.0; }, kPi};
  double s = max_row_sum(k, rho);
  CHECK(s == doctest::Approx(integrate(rho)).epsilon(0.05));
  CHECK(s > 0.0);
}
