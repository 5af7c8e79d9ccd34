#include "qheun/qhypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qheun/error.hpp"
#include "qheun/operator.hpp"

namespace qheun {

Scalar q_pochhammer(Scalar a, Scalar q, int n) {
  Scalar p = 1.0;
  Scalar qi = 1.0;
  for (int i = 0; i < n; ++i) {
    p *= 1.0 - a * qi;
    qi *= q;
  }
  return p;
}

LaurentPoly q_hypergeometric_series(Scalar a, Scalar b, Scalar c, Scalar q, int order, const Tolerances& tol) {
  if (!(q > 0.0) || q == 1.0) throw Error(ErrorKind::InvalidParams, "q must be positive and != 1");
  std::vector<Scalar> coeffs;
  Scalar term = 1.0;
  Scalar qi = 1.0;
  for (int n = 0; n < order; ++n) {
    coeffs.push_back(term);
    if (n + 1 == order) break;
    const Scalar den_c = 1.0 - c * qi;
    const Scalar den_q = 1.0 - q * qi;
    if (std::abs(den_c) < tol.vanish * std::max(1.0, std::abs(c * qi))) {
      throw Error(ErrorKind::PochhammerPole, "(c; q)_n vanishes at n = " + std::to_string(n + 1));
    }
    term *= (1.0 - a * qi) * (1.0 - b * qi) / (den_q * den_c);
    qi *= q;
  }
  return LaurentPoly::from_dense(0, coeffs);
}

QDiffEquation q_hypergeometric_equation(Scalar a, Scalar b, Scalar c, Scalar q) {
  QDiffEquation eq;
  eq.q = q;
  eq.u = LaurentPoly({{1, 1.0}, {0, -q}});
  eq.v = LaurentPoly({{1, -(a + b)}, {0, q + c}});
  eq.w = LaurentPoly({{1, a * b}, {0, -c}});
  return eq;
}

LinearDivision divide_linear(const LaurentPoly& p, Scalar root) {
  LinearDivision out;
  if (p.is_zero()) return out;
  if (p.lowest() < 0) throw Error(ErrorKind::InvalidParams, "divide_linear needs an ordinary polynomial");
  const int top = p.highest();
  std::vector<Scalar> quotient(static_cast<std::size_t>(std::max(top, 0)), 0.0);
  Scalar carry = 0.0;
  for (int k = top; k >= 0; --k) {
    carry = p[k] + carry * root;
    if (k > 0) quotient[static_cast<std::size_t>(k - 1)] = carry;
  }
  out.remainder = carry;
  out.quotient = LaurentPoly::from_dense(0, quotient);
  return out;
}

Scalar reducible_accessory(const ModelParams& p) {
  const Scalar q = p.q;
  return -(qpow(q, p.alpha1) + qpow(q, p.alpha2)) * qpow(q, p.h[1] + 0.5) * p.t[1] -
         qpow(q, (p.h[0] - p.h[1] + p.l[0] + p.l[1] + p.alpha1 + p.alpha2 - 1) / 2) *
             (qpow(q, p.beta / 2) + qpow(q, -p.beta / 2)) * p.t[0];
}

HypergeometricReduction reduce_to_q_hypergeometric(const ModelParams& p, const Tolerances& tol) {
  p.validate();
  if (p.family != Family::A4) throw Error(ErrorKind::NotReducible, "reduction needs the A4 family");
  if (std::abs(p.l[1] - p.h[1] - 1.0) > tol.integrality * std::max(1.0, std::abs(p.l[1]))) {
    throw Error(ErrorKind::NotReducible, "reduction needs l2 = h2 + 1");
  }
  const Scalar q = p.q;
  const QDiffEquation eq = build_equation(p);

  HypergeometricReduction r;
  r.root = qpow(q, p.h[1] + 0.5) * p.t[1];
  const auto du = divide_linear(eq.u, r.root);
  const auto dv = divide_linear(eq.v, r.root);
  const auto dw = divide_linear(eq.w, r.root);
  // Remainder relative to the coefficients evaluated at the root.
  auto relative = [&](const LaurentPoly& poly, Scalar rem) {
    Scalar scale = 0.0;
    for (const auto& [k, c] : poly.terms()) scale += std::abs(c * std::pow(r.root, k));
    return scale > 0.0 ? std::abs(rem) / scale : 0.0;
  };
  r.remainder = std::max({relative(eq.u, du.remainder), relative(eq.v, dv.remainder), relative(eq.w, dw.remainder)});
  if (r.remainder > tol.vanish) {
    throw Error(ErrorKind::NotReducible, "no common factor (x - q^(h2+1/2) t2): relative remainder " +
                                             std::to_string(r.remainder));
  }
  r.divided = QDiffEquation{du.quotient, dv.quotient, dw.quotient, q, eq.normalization};

  // x = scale * y moves the root of the divided u to y = q; the gauge
  // g = x^nu f with nu the exponent at 0 removes the constant-term mismatch.
  r.scale = qpow(q, p.h[0] - 0.5) * p.t[0];
  r.nu = (p.h[0] - p.l[0] - p.alpha1 - p.alpha2 + 1 - p.beta) / 2;
  const Scalar sigma = qpow(q, r.nu);
  r.a = sigma * qpow(q, p.alpha1);
  r.b = sigma * qpow(q, p.alpha2);
  r.c = sigma * sigma * qpow(q, p.alpha1 + p.alpha2 + p.l[0] - p.h[0]);
  r.equation = q_hypergeometric_equation(r.a, r.b, r.c, q);
  return r;
}

}  // namespace qheun
