#pragma once

#include <vector>

#include "qheun/laurent.hpp"
#include "qheun/params.hpp"

namespace qheun {

// Polynomial form of (A - E) g = 0 for the family in params:
// u = a(x), v = b(x) - E x^p, w = c(x) with p = normalization_power(family).
// The A4 equation keeps the q^(alpha1 + alpha2) prefactor on w.
QDiffEquation build_equation(const ModelParams& params);

struct DCoefficient {
  int shift;
  Scalar value;
};

// Closed-form action on monomials: A x^mu = sum_s d_s(mu) x^(mu + s).
// Shifts are listed from the highest down: {+1, 0, -1} for A4,
// {+2, +1, 0, -1} for A3 and {+2, +1, 0, -1, -2} for A2.
std::vector<DCoefficient> d_coefficients(const ModelParams& params, Scalar mu);

// Value of a single shift; zero when the family has no such shift.
Scalar d_coefficient(const ModelParams& params, int shift, Scalar mu);

// Equation for h where g = x^nu h: (q^-nu u, v, q^nu w).
QDiffEquation gauge_transform(const QDiffEquation& eq, Scalar nu);

}  // namespace qheun
