#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flock/experiment.hpp"

namespace flock {

struct AcceptanceCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceReport {
  std::string suite;
  std::vector<AcceptanceCheck> checks;
  bool all_pass() const;
};

/// Named acceptance bundles with pinned configurations.  Suite names:
/// conservation, inequalities, oracles, theorem1, theorem2, theorem3,
/// envelopes.  Re-runs of the same pinned simulation within one process are
/// memoized.
class AcceptanceRunner {
 public:
  explicit AcceptanceRunner(std::uint64_t seed = 0);
  ~AcceptanceRunner();

  AcceptanceReport run_suite(const std::string& suite);
  static std::vector<std::string> suite_names();

  std::string report_json(const std::vector<AcceptanceReport>& reports) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Independent brute-force quadrature oracle for L_psi with an analytic
/// integrand: refined midpoint sum (refine subcells per coarse cell) plus a
/// Taylor correction for the near-diagonal sliver.  Deliberately shares no
/// code with l_psi.
double oracle_lpsi_singular(const std::function<double(double)>& f,
                            const std::function<double(double)>& f_second, double x,
                            double lambda, double r0, double alpha, double rho_uniform,
                            double tau, int n_cells, int refine);

}  // namespace flock
