#include "qheun/laurent.hpp"

#include <algorithm>
#include <cmath>

#include "qheun/error.hpp"

namespace qheun {

Scalar qpow(Scalar q, Scalar h) { return std::exp(h * std::log(q)); }

LaurentPoly::LaurentPoly(std::map<int, Scalar> coeffs) : coeffs_(std::move(coeffs)) {
  std::erase_if(coeffs_, [](const auto& kv) { return kv.second == 0.0; });
}

LaurentPoly LaurentPoly::monomial(int degree, Scalar coeff) {
  LaurentPoly p;
  p.add_term(degree, coeff);
  return p;
}

LaurentPoly LaurentPoly::from_dense(int lowest, std::span<const Scalar> coeffs) {
  LaurentPoly p;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    p.add_term(lowest + static_cast<int>(i), coeffs[i]);
  }
  return p;
}

int LaurentPoly::lowest() const {
  if (coeffs_.empty()) throw Error(ErrorKind::InvalidParams, "lowest degree of the zero polynomial");
  return coeffs_.begin()->first;
}

int LaurentPoly::highest() const {
  if (coeffs_.empty()) throw Error(ErrorKind::InvalidParams, "highest degree of the zero polynomial");
  return coeffs_.rbegin()->first;
}

Scalar LaurentPoly::operator[](int degree) const {
  auto it = coeffs_.find(degree);
  return it == coeffs_.end() ? 0.0 : it->second;
}

std::vector<Scalar> LaurentPoly::dense() const {
  if (coeffs_.empty()) return {};
  std::vector<Scalar> out(static_cast<std::size_t>(highest() - lowest() + 1), 0.0);
  for (const auto& [k, c] : coeffs_) out[static_cast<std::size_t>(k - lowest())] = c;
  return out;
}

Scalar LaurentPoly::max_abs() const {
  Scalar m = 0.0;
  for (const auto& [k, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

LaurentPoly LaurentPoly::scaled_argument(Scalar s) const {
  LaurentPoly out;
  for (const auto& [k, c] : coeffs_) out.add_term(k, c * std::pow(s, k));
  return out;
}

LaurentPoly LaurentPoly::shifted(int m) const {
  LaurentPoly out;
  for (const auto& [k, c] : coeffs_) out.coeffs_.emplace(k + m, c);
  return out;
}

void LaurentPoly::add_term(int degree, Scalar value) {
  if (value == 0.0) return;
  auto [it, inserted] = coeffs_.try_emplace(degree, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) coeffs_.erase(it);
  }
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& other) {
  for (const auto& [k, c] : other.coeffs_) add_term(k, c);
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& other) {
  for (const auto& [k, c] : other.coeffs_) add_term(k, -c);
  return *this;
}

LaurentPoly& LaurentPoly::operator*=(Scalar s) {
  if (s == 0.0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [k, c] : coeffs_) c *= s;
  return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly out;
  for (const auto& [i, ci] : a.coeffs_) {
    for (const auto& [j, cj] : b.coeffs_) out.add_term(i + j, ci * cj);
  }
  return out;
}

LaurentPoly from_roots(std::span<const Scalar> roots, Scalar prefactor) {
  LaurentPoly p = LaurentPoly::monomial(0, prefactor);
  for (Scalar r : roots) {
    p = p * LaurentPoly(std::map<int, Scalar>{{0, -r}, {1, 1.0}});
  }
  return p;
}

void validate(const QDiffEquation& eq) {
  if (!(eq.q > 0.0) || eq.q == 1.0 || !std::isfinite(eq.q)) {
    throw Error(ErrorKind::InvalidParams, "q must be a positive real number with q != 1");
  }
  if (eq.u.is_zero() || eq.w.is_zero()) {
    throw Error(ErrorKind::InvalidParams, "u and w must be nonzero for a second-order equation");
  }
}

namespace {

template <class Term>
LaurentPoly apply_impl(const QDiffEquation& eq, Scalar lambda, const LaurentPoly& g, Term term) {
  LaurentPoly out;
  const Scalar logq = std::log(eq.q);
  for (const auto& [k, c] : g.terms()) {
    const Scalar down = std::exp(-(lambda + k) * logq);
    const Scalar up = std::exp((lambda + k) * logq);
    LaurentPoly piece;
    for (const auto& [j, uj] : eq.u.terms()) piece += LaurentPoly::monomial(j + k, term(uj * down, c));
    for (const auto& [j, vj] : eq.v.terms()) piece += LaurentPoly::monomial(j + k, term(vj, c));
    for (const auto& [j, wj] : eq.w.terms()) piece += LaurentPoly::monomial(j + k, term(wj * up, c));
    out += piece;
  }
  return out;
}

}  // namespace

LaurentPoly apply_equation(const QDiffEquation& eq, const LaurentPoly& g) {
  return apply_equation_offset(eq, 0.0, g);
}

LaurentPoly apply_equation_offset(const QDiffEquation& eq, Scalar lambda, const LaurentPoly& g) {
  return apply_impl(eq, lambda, g, [](Scalar a, Scalar c) { return a * c; });
}

LaurentPoly apply_equation_magnitude(const QDiffEquation& eq, Scalar lambda, const LaurentPoly& g) {
  return apply_impl(eq, lambda, g, [](Scalar a, Scalar c) { return std::abs(a * c); });
}

}  // namespace qheun
