#include "flock/fourier.hpp"

#include <cmath>
#include <vector>

#include "flock/errors.hpp"

namespace flock {

namespace {

// Real DFT at the cell centers x_j = -pi + (j + 1/2) dx.  Writes
//   f(x) ~ a0 + sum_{k=1}^{n/2-1} (a_k cos kx + b_k sin kx) + a_{n/2} cos(n/2 x)
// The half-cell offset is absorbed by rotating the tabulated transform.
struct RealCoeffs {
  std::vector<double> a, b;  // size n/2 + 1
};

RealCoeffs analyze(const Field& f) {
  const int n = f.size();
  const auto& g = f.grid();
  const auto& ct = g.cos_table();
  const auto& st = g.sin_table();
  RealCoeffs c;
  c.a.assign(n / 2 + 1, 0.0);
  c.b.assign(n / 2 + 1, 0.0);
  // cos(k x_j) with x_j = -pi + (j+1/2) dx: phase = k*(j+1/2)*2pi/n - k*pi,
  // i.e. index (2*k*j + k) over a doubled table would be needed; instead use
  // phase = 2pi/n * (k*j) plus the fixed offset k*(dx/2 - pi).
  for (int k = 0; k <= n / 2; ++k) {
    double off = k * (g.dx() * 0.5 - 3.14159265358979323846);
    double co = std::cos(off), so = std::sin(off);
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j < n; ++j) {
      int idx = static_cast<int>((static_cast<long long>(k) * j) % n);
      // cos(k x_j) = cos(2pi k j / n + off), sin likewise
      double cc = ct[idx] * co - st[idx] * so;
      double ss = st[idx] * co + ct[idx] * so;
      sa += f[j] * cc;
      sb += f[j] * ss;
    }
    c.a[k] = 2.0 * sa / n;
    c.b[k] = 2.0 * sb / n;
  }
  c.a[0] *= 0.5;
  c.b[0] = 0.0;
  if (n % 2 == 0) {
    c.a[n / 2] *= 0.5;
    c.b[n / 2] = 0.0;  // sin(n/2 x_j) alternates but is dropped with Nyquist
  }
  return c;
}

Field synthesize(const GridPtr& grid, const RealCoeffs& c) {
  const int n = grid->n_cells();
  const auto& ct = grid->cos_table();
  const auto& st = grid->sin_table();
  Field out(grid);
  for (int k = 0; k <= n / 2; ++k) {
    if (c.a[k] == 0.0 && c.b[k] == 0.0) continue;
    double off = k * (grid->dx() * 0.5 - 3.14159265358979323846);
    double co = std::cos(off), so = std::sin(off);
    for (int j = 0; j < n; ++j) {
      int idx = static_cast<int>((static_cast<long long>(k) * j) % n);
      double cc = ct[idx] * co - st[idx] * so;
      double ss = st[idx] * co + ct[idx] * so;
      out[j] += c.a[k] * cc + c.b[k] * ss;
    }
  }
  return out;
}

}  // namespace

Field spectral_antiderivative(const Field& f) {
  RealCoeffs c = analyze(f);
  const int n = f.size();
  double mean = c.a[0];
  RealCoeffs ic;
  ic.a.assign(n / 2 + 1, 0.0);
  ic.b.assign(n / 2 + 1, 0.0);
  // d/dx [a sin(kx) - b cos(kx)] / k = a cos(kx) + b sin(kx)
  for (int k = 1; k <= n / 2; ++k) {
    ic.a[k] = -c.b[k] / k;
    ic.b[k] = c.a[k] / k;
  }
  Field out = synthesize(f.grid_ptr(), ic);
  for (int j = 0; j < out.size(); ++j) out[j] += mean * f.grid().center(j);
  return out;
}

Field invert_periodic_derivative(const Field& g) {
  const int n = g.size();
  const double h = g.grid().dx();
  RealCoeffs c = analyze(g);
  if (std::abs(c.a[0]) > 1e-8 * std::max(1.0, g.max_abs()))
    throw PeriodicityError("invert_periodic_derivative: source has nonzero mean");
  RealCoeffs ic;
  ic.a.assign(n / 2 + 1, 0.0);
  ic.b.assign(n / 2 + 1, 0.0);
  // Symbol of the 4th-order central difference: D4 e^{ikx} = i s(k) e^{ikx}.
  for (int k = 1; k < n / 2; ++k) {
    double s = (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
    // D4 [A cos kx + B sin kx] = s(k) (-A sin kx + B cos kx)
    // want that equal to a_k cos kx + b_k sin kx:  B = a_k/s, A = -b_k/s
    ic.a[k] = -c.b[k] / s;
    ic.b[k] = c.a[k] / s;
  }
  // Nyquist mode: s(n/2) = 0; dropped.
  return synthesize(g.grid_ptr(), ic);
}

}  // namespace flock
