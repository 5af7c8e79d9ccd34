#pragma once

#include "qheun/laurent.hpp"
#include "qheun/params.hpp"
#include "qheun/tolerance.hpp"

namespace qheun {

// (a; q)_n = prod_{i<n} (1 - a q^i).
Scalar q_pochhammer(Scalar a, Scalar q, int n);

// Truncated basic hypergeometric series 2phi1(a, b; c; x): the terms
// n = 0 .. order-1. Throws PochhammerPole when a (c; q)_n factor vanishes.
LaurentPoly q_hypergeometric_series(Scalar a, Scalar b, Scalar c, Scalar q, int order,
                                    const Tolerances& tol = {});

// Standard form (x - q) f(x/q) - ((a+b)x - q - c) f(x) + (abx - c) f(qx) = 0.
QDiffEquation q_hypergeometric_equation(Scalar a, Scalar b, Scalar c, Scalar q);

struct LinearDivision {
  LaurentPoly quotient;
  Scalar remainder = 0.0;
};

// Synthetic division of an ordinary polynomial by (x - root).
LinearDivision divide_linear(const LaurentPoly& p, Scalar root);

struct HypergeometricReduction {
  Scalar a = 0.0;
  Scalar b = 0.0;
  Scalar c = 0.0;
  // Standard-form equation in the rescaled variable y = x / scale.
  QDiffEquation equation;
  // q-Heun equation after removing the common factor (x - root).
  QDiffEquation divided;
  Scalar root = 0.0;
  Scalar scale = 0.0;
  // g(x) = x^nu f(x / scale) solves the q-Heun equation when f solves
  // the standard form.
  Scalar nu = 0.0;
  // Largest division remainder relative to the coefficient norm.
  Scalar remainder = 0.0;
};

// Value of E for which the A4 equation with l2 = h2 + 1 factors.
Scalar reducible_accessory(const ModelParams& params);

// Requires family A4, l2 = h2 + 1 and E = reducible_accessory(params);
// otherwise throws NotReducible.
HypergeometricReduction reduce_to_q_hypergeometric(const ModelParams& params, const Tolerances& tol = {});

}  // namespace qheun
