#pragma once

#include <map>
#include <span>
#include <vector>

namespace qheun {

using Scalar = double;

// q^h for real h. q must be positive.
Scalar qpow(Scalar q, Scalar h);

// Sparse Laurent polynomial sum_k c_k x^k with finitely many nonzero terms.
// Exact zeros are never stored, so the extremal stored degrees always carry
// nonzero coefficients.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  explicit LaurentPoly(std::map<int, Scalar> coeffs);

  static LaurentPoly monomial(int degree, Scalar coeff = 1.0);
  // coeffs[i] is the coefficient of x^(lowest + i).
  static LaurentPoly from_dense(int lowest, std::span<const Scalar> coeffs);

  bool is_zero() const { return coeffs_.empty(); }
  int lowest() const;   // M
  int highest() const;  // N
  Scalar operator[](int degree) const;
  const std::map<int, Scalar>& terms() const { return coeffs_; }

  // Coefficients from lowest() to highest(), zero filled.
  std::vector<Scalar> dense() const;
  Scalar max_abs() const;

  // p(s x): the coefficient of x^k is multiplied by s^k.
  LaurentPoly scaled_argument(Scalar s) const;
  // x^m p(x).
  LaurentPoly shifted(int m) const;

  LaurentPoly& operator+=(const LaurentPoly& other);
  LaurentPoly& operator-=(const LaurentPoly& other);
  LaurentPoly& operator*=(Scalar s);

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator*(LaurentPoly a, Scalar s) { return a *= s; }
  friend LaurentPoly operator*(Scalar s, LaurentPoly a) { return a *= s; }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend bool operator==(const LaurentPoly&, const LaurentPoly&) = default;

 private:
  void add_term(int degree, Scalar value);

  std::map<int, Scalar> coeffs_;
};

// Product of linear factors prefactor * prod (x - r_i).
LaurentPoly from_roots(std::span<const Scalar> roots, Scalar prefactor = 1.0);

// u(x) g(x/q) + v(x) g(x) + w(x) g(qx) = 0.
struct QDiffEquation {
  LaurentPoly u;
  LaurentPoly v;
  LaurentPoly w;
  Scalar q = 0.0;
  // Power of x the operator form was multiplied by to obtain (u, v, w).
  int normalization = 0;
};

// Checks q > 0, q != 1 and that u, w are nonzero.
void validate(const QDiffEquation& eq);

// Exact substitution of the Laurent polynomial g into the equation.
LaurentPoly apply_equation(const QDiffEquation& eq, const LaurentPoly& g);

// Substitution of x^lambda g(x); the returned polynomial carries the same
// offset x^lambda, which is left implicit.
LaurentPoly apply_equation_offset(const QDiffEquation& eq, Scalar lambda,
                                  const LaurentPoly& g);

// Same sum as apply_equation_offset but with every participating term taken
// in absolute value; the natural scale for relative residuals.
LaurentPoly apply_equation_magnitude(const QDiffEquation& eq, Scalar lambda,
                                     const LaurentPoly& g);

}  // namespace qheun
