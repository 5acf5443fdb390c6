#include "flock/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "flock/errors.hpp"
#include "flock/fourier.hpp"
#include "flock/kernels.hpp"

namespace flock {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

TorusGrid::TorusGrid(int n_cells) : n_(n_cells), dx_(kTwoPi / n_cells) {
  centers_.resize(n_);
  for (int i = 0; i < n_; ++i) centers_[i] = -kPi + (i + 0.5) * dx_;
  cos_.resize(n_);
  sin_.resize(n_);
  for (int m = 0; m < n_; ++m) {
    cos_[m] = std::cos(kTwoPi * m / n_);
    sin_[m] = std::sin(kTwoPi * m / n_);
  }
}

std::shared_ptr<const TorusGrid> TorusGrid::make(int n_cells) {
  if (n_cells < 8 || n_cells % 2 != 0)
    throw DomainError("TorusGrid: n_cells must be even and >= 8, got " +
                      std::to_string(n_cells));
  return std::shared_ptr<const TorusGrid>(new TorusGrid(n_cells));
}

double TorusGrid::geodesic(int i, int j) const {
  int k = wrap(j - i);
  return std::min(k, n_ - k) * dx_;
}

Field::Field(GridPtr grid, double fill)
    : grid_(std::move(grid)), v_(grid_->n_cells(), fill) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid_->n_cells())
    throw DomainError("Field: value count does not match grid");
}

double Field::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field::max() const { return *std::max_element(v_.begin(), v_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

void Field::check_finite(const std::string& label) const {
  for (double x : v_)
    if (!std::isfinite(x)) throw InvariantError(label + ": non-finite value");
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().dx();
}

Field periodic_derivative(const Field& f) {
  const int n = f.size();
  const double h = f.grid().dx();
  Field out(f.grid_ptr());
  const auto& g = f.grid();
  for (int i = 0; i < n; ++i) {
    out[i] = (8.0 * (f[g.wrap(i + 1)] - f[g.wrap(i - 1)]) -
              (f[g.wrap(i + 2)] - f[g.wrap(i - 2)])) /
             (12.0 * h);
  }
  return out;
}

Field make_initial_density(const DensitySpec& spec, const GridPtr& grid) {
  if (spec.mass <= 0.0) throw DomainError("density mass must be positive");
  Field rho(grid, 1.0);
  switch (spec.kind) {
    case DensitySpec::Kind::Uniform:
      break;
    case DensitySpec::Kind::CosineBump: {
      if (spec.amplitude < 0.0 || spec.amplitude >= 1.0)
        throw DomainError("cosine bump amplitude must lie in [0, 1)");
      for (int i = 0; i < rho.size(); ++i)
        rho[i] = 1.0 + spec.amplitude * std::cos(spec.mode * grid->center(i));
      break;
    }
    case DensitySpec::Kind::GaussianBump: {
      if (spec.width <= 0.0) throw DomainError("gaussian bump width must be positive");
      // Periodized bump: wrap a few images around the torus.
      for (int i = 0; i < rho.size(); ++i) {
        double s = 0.0;
        for (int img = -2; img <= 2; ++img) {
          double z = grid->center(i) + img * kTwoPi;
          s += std::exp(-0.5 * z * z / (spec.width * spec.width));
        }
        rho[i] = 0.05 + s;  // small pedestal keeps the density away from vacuum
      }
      break;
    }
  }
  double m = integrate(rho);
  for (double& v : rho.values()) v *= spec.mass / m;
  return rho;
}

Field load_density_csv(const std::string& path, const GridPtr& grid, double mass) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open density CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  // Tolerate a trailing \r from CRLF files.
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  if (line != "rho") throw ConfigError(path + ": expected header \"rho\", got \"" + line + "\"");
  std::vector<double> v;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    try {
      v.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: " + line);
    }
  }
  if (static_cast<int>(v.size()) != grid->n_cells())
    throw ConfigError(path + ": expected " + std::to_string(grid->n_cells()) +
                      " samples, got " + std::to_string(v.size()));
  Field rho(grid, std::move(v));
  if (rho.min() <= 0.0) throw ConfigError(path + ": density samples must be positive");
  double m = integrate(rho);
  for (double& x : rho.values()) x *= mass / m;
  return rho;
}

Field make_zero_e_velocity(const Field& rho0, const KernelSpec& kernel, double u_mean) {
  if (rho0.min() <= 0.0) throw SingularityError("make_zero_e_velocity: rho0 must be positive");
  Field lp = l_psi(kernel, rho0, rho0);
  double closure = std::abs(integrate(lp));
  double tol = 1e-10 * std::max(1.0, rho0.max_abs());
  if (closure > tol)
    throw PeriodicityError("make_zero_e_velocity: integral of L_psi(rho0) = " +
                           std::to_string(closure) + " exceeds tolerance (asymmetric kernel?)");
  for (double& v : lp.values()) v = -v;
  Field u = invert_periodic_derivative(lp);
  for (double& v : u.values()) v += u_mean;
  return u;
}

Field make_velocity_with_q(const Field& rho0, const KernelSpec& kernel, const Field& q0,
                           double u_mean) {
  if (rho0.min() <= 0.0) throw SingularityError("make_velocity_with_q: rho0 must be positive");
  // e = rho*q must integrate to zero; shift q by a constant if needed.
  Field q = q0;
  double shift = 0.0;
  {
    Field rq(rho0.grid_ptr());
    for (int i = 0; i < rq.size(); ++i) rq[i] = rho0[i] * q[i];
    shift = integrate(rq) / integrate(rho0);
  }
  Field g(rho0.grid_ptr());
  Field lp = l_psi(kernel, rho0, rho0);
  for (int i = 0; i < g.size(); ++i) g[i] = rho0[i] * (q[i] - shift) - lp[i];
  Field u = invert_periodic_derivative(g);
  for (double& v : u.values()) v += u_mean;
  return u;
}

}  // namespace flock
