#pragma once

namespace qheun {

// All tolerances are relative to the largest magnitude among the terms that
// take part in the quantity being tested.
struct Tolerances {
  // A coefficient, residual or consistency sum counts as zero below this.
  double vanish = 1e-10;
  // Distance to an integer for resonance and invariant-subspace conditions.
  double integrality = 1e-8;
  // Characteristic-equation residual accepted for a user supplied exponent.
  double exponent_match = 1e-8;
};

}  // namespace qheun
