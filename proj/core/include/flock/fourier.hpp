#pragma once

#include "flock/grid.hpp"

namespace flock {

// Small dense-DFT helpers for cell-centered periodic data.  O(n^2) with the
// grid's precomputed trig tables; n stays at desk scale here.

/// Antiderivative A of f at the cell centers, A' = f, with the linear part
/// mean(f)*x included (A is not periodic unless mean(f) = 0).  Spectrally
/// accurate for smooth f.
Field spectral_antiderivative(const Field& f);

/// Solves D4 u = g for the discrete fourth-order derivative operator D4,
/// zero-mean solution.  Requires |integrate(g)| small; the Nyquist mode of g
/// (annihilated by D4) is dropped.
Field invert_periodic_derivative(const Field& g);

}  // namespace flock
