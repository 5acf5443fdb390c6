#pragma once

#include <memory>
#include <string>
#include <vector>

namespace flock {

struct KernelSpec;

/// Uniform cell-centered periodic discretization of T = [-pi, pi].
class TorusGrid {
 public:
  static std::shared_ptr<const TorusGrid> make(int n_cells);

  int n_cells() const { return n_; }
  double dx() const { return dx_; }
  double center(int i) const { return centers_[i]; }
  const std::vector<double>& centers() const { return centers_; }

  int wrap(int i) const {
    int m = i % n_;
    return m < 0 ? m + n_ : m;
  }

  /// Geodesic distance between cell centers i and j (<= pi).
  double geodesic(int i, int j) const;

  // Trig tables for the O(n^2) DFT helpers: cos/sin(2*pi*m/n), m in [0, n).
  const std::vector<double>& cos_table() const { return cos_; }
  const std::vector<double>& sin_table() const { return sin_; }

 private:
  explicit TorusGrid(int n_cells);
  int n_;
  double dx_;
  std::vector<double> centers_;
  std::vector<double> cos_, sin_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

/// Real-valued grid function on a TorusGrid.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0);
  Field(GridPtr grid, std::vector<double> values);

  const TorusGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(v_.size()); }

  double& operator[](int i) { return v_[i]; }
  double operator[](int i) const { return v_[i]; }
  /// Access with periodic index wrap.
  double at_wrapped(int i) const { return v_[grid_->wrap(i)]; }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  double min() const;
  double max() const;
  double max_abs() const;

  /// Throws InvariantError on non-finite entries or grid mismatch.
  void check_finite(const std::string& label) const;

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

struct FlockState {
  Field rho;
  Field u;
  double time = 0.0;
};

/// Midpoint quadrature over T: sum f_i * dx.
double integrate(const Field& f);

/// Fourth-order central difference with periodic wrap.
Field periodic_derivative(const Field& f);

struct DensitySpec {
  enum class Kind { Uniform, CosineBump, GaussianBump };
  Kind kind = Kind::Uniform;
  double mass = 2.0 * 3.14159265358979323846;
  double amplitude = 0.0;  // cosine bump, in [0, 1)
  int mode = 1;            // cosine bump
  double width = 0.5;      // gaussian bump
};

/// Positive density with integrate(rho) == mass to rounding.
Field make_initial_density(const DensitySpec& spec, const GridPtr& grid);

/// Single-column CSV (header "rho") of n_cells samples; validated positive,
/// renormalized to the requested mass.
Field load_density_csv(const std::string& path, const GridPtr& grid, double mass);

/// Velocity with mean u_mean satisfying periodic_derivative(u) + L_psi(rho0) = 0
/// in the discrete operators.  Throws PeriodicityError if the kernel image of
/// rho0 fails to integrate to zero.
Field make_zero_e_velocity(const Field& rho0, const KernelSpec& kernel, double u_mean);

/// Velocity realizing a prescribed q0 = e0/rho0 (q0 is first shifted by a
/// constant so that integral of rho0*q0 vanishes, as e must).
Field make_velocity_with_q(const Field& rho0, const KernelSpec& kernel, const Field& q0,
                           double u_mean);

}  // namespace flock
