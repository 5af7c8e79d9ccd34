#include "qheun/local.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>

#include "qheun/error.hpp"

namespace qheun {

std::string_view to_string(BasePoint point) { return point == BasePoint::Zero ? "zero" : "infinity"; }

std::string_view to_string(SeriesStatus status) {
  switch (status) {
    case SeriesStatus::Generic: return "Generic";
    case SeriesStatus::ApparentResonance: return "ApparentResonance";
    case SeriesStatus::LogarithmicNeeded: return "LogarithmicNeeded";
  }
  return "?";
}

std::optional<int> ExponentPair::resonance_index() const {
  if (!resonant) return std::nullopt;
  const auto k = static_cast<int>(std::lround(difference));
  if (k < 1) return std::nullopt;
  return k;
}

Scalar LocalExpansion::offset() const { return point == BasePoint::Zero ? lambda : -lambda; }

LaurentPoly LocalExpansion::polynomial() const {
  LaurentPoly p;
  const int sign = point == BasePoint::Zero ? 1 : -1;
  for (std::size_t n = 0; n < coeffs.size(); ++n) p += LaurentPoly::monomial(sign * static_cast<int>(n), coeffs[n]);
  return p;
}

namespace {

// Local chart at 0 (sign +1, base M) or at infinity (sign -1, base N). The
// coefficient of the recurrence term with index gap j at exponent mu is
// q^(-sign mu) u_{base + sign j} + v_{base + sign j} + q^(sign mu) w_{base + sign j}.
struct Chart {
  const QDiffEquation& eq;
  int sign;
  int base;

  Chart(const QDiffEquation& e, BasePoint point)
      : eq(e),
        sign(point == BasePoint::Zero ? 1 : -1),
        base(point == BasePoint::Zero ? e.u.lowest() : e.u.highest()) {}

  struct Term {
    Scalar value;
    Scalar magnitude;
  };

  Term term(int j, Scalar mu) const {
    const int k = base + sign * j;
    const Scalar down = qpow(eq.q, -sign * mu);
    const Scalar a = down * eq.u[k];
    const Scalar b = eq.v[k];
    const Scalar c = eq.w[k] / down;
    return {a + b + c, std::abs(a) + std::abs(b) + std::abs(c)};
  }
};

bool near_integer(Scalar d, Scalar tol) { return std::abs(d - std::round(d)) < tol; }

}  // namespace

bool classify(const QDiffEquation& eq, BasePoint point) {
  validate(eq);
  if (point == BasePoint::Zero) {
    const int m = eq.u.lowest();
    const int mv = eq.v.is_zero() ? INT_MAX : eq.v.lowest();
    return m == eq.w.lowest() && m <= mv;
  }
  const int n = eq.u.highest();
  const int nv = eq.v.is_zero() ? INT_MIN : eq.v.highest();
  return n == eq.w.highest() && n >= nv;
}

Scalar characteristic_residual(const QDiffEquation& eq, BasePoint point, Scalar lambda) {
  const auto t = Chart(eq, point).term(0, lambda);
  return t.magnitude > 0.0 ? std::abs(t.value) / t.magnitude : 0.0;
}

ExponentPair exponents(const QDiffEquation& eq, BasePoint point, const Tolerances& tol) {
  if (!classify(eq, point)) {
    throw Error(ErrorKind::IrregularPoint, std::string("x = ") + std::string(to_string(point)) +
                                               " is not a regular singularity");
  }
  // A tau^2 + B tau + C = 0 with tau = q^lambda.
  Scalar A, B, C;
  if (point == BasePoint::Zero) {
    const int m = eq.u.lowest();
    A = eq.w[m], B = eq.v[m], C = eq.u[m];
  } else {
    const int n = eq.u.highest();
    A = eq.u[n], B = eq.v[n], C = eq.w[n];
  }
  Scalar disc = B * B - 4.0 * A * C;
  if (disc < 0.0) {
    if (-disc > tol.vanish * (B * B + std::abs(4.0 * A * C))) {
      throw Error(ErrorKind::NonRealExponent, "characteristic roots are complex");
    }
    disc = 0.0;
  }
  const Scalar root = std::sqrt(disc);
  const Scalar big = B >= 0.0 ? -(B + root) / 2.0 : -(B - root) / 2.0;
  const Scalar tau1 = big / A;
  const Scalar tau2 = C / big;
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) {
    throw Error(ErrorKind::NonRealExponent, "characteristic root q^lambda is not a positive real");
  }
  const Scalar logq = std::log(eq.q);
  Scalar l1 = std::log(tau1) / logq;
  Scalar l2 = std::log(tau2) / logq;
  if (l1 > l2) std::swap(l1, l2);
  ExponentPair out{l1, l2, l2 - l1, false};
  out.resonant = near_integer(out.difference, tol.integrality);
  return out;
}

LocalExpansion frobenius_series(const QDiffEquation& eq, BasePoint point, Scalar lambda, int order,
                                const Tolerances& tol) {
  if (order < 0) throw Error(ErrorKind::InvalidParams, "series order must be nonnegative");
  if (!classify(eq, point)) {
    throw Error(ErrorKind::IrregularPoint, std::string("x = ") + std::string(to_string(point)) +
                                               " is not a regular singularity");
  }
  const Scalar res = characteristic_residual(eq, point, lambda);
  if (res > tol.exponent_match) {
    throw Error(ErrorKind::ExponentMismatch, "lambda = " + std::to_string(lambda) +
                                                 " does not solve the characteristic equation (residual " +
                                                 std::to_string(res) + ")");
  }
  const ExponentPair ex = exponents(eq, point, tol);
  const Scalar other = std::abs(lambda - ex.lambda1) <= std::abs(lambda - ex.lambda2) ? ex.lambda2 : ex.lambda1;
  std::optional<int> resonance;
  if (near_integer(other - lambda, tol.integrality) && std::lround(other - lambda) >= 1) {
    resonance = static_cast<int>(std::lround(other - lambda));
  }

  const Chart chart(eq, point);
  LocalExpansion out;
  out.point = point;
  out.lambda = lambda;
  out.coeffs.reserve(static_cast<std::size_t>(order) + 1);
  out.coeffs.push_back(1.0);
  for (int n = 1; n <= order; ++n) {
    Scalar sum = 0.0;
    Scalar scale = 0.0;
    for (int l = 0; l < n; ++l) {
      const Scalar c = out.coeffs[static_cast<std::size_t>(l)];
      if (c == 0.0) continue;
      const auto t = chart.term(n - l, lambda + l);
      sum += t.value * c;
      scale += t.magnitude * std::abs(c);
    }
    if (resonance && n == *resonance) {
      out.resonance = n;
      out.consistency = scale > 0.0 ? std::abs(sum) / scale : 0.0;
      if (out.consistency < tol.vanish) {
        out.status = SeriesStatus::ApparentResonance;
        out.coeffs.push_back(0.0);
        continue;
      }
      out.status = SeriesStatus::LogarithmicNeeded;
      break;
    }
    const auto lead = chart.term(0, lambda + n);
    out.coeffs.push_back(-sum / lead.value);
  }
  out.order = static_cast<int>(out.coeffs.size()) - 1;
  return out;
}

ApparencyCheck check_apparency(const QDiffEquation& eq, BasePoint point, const Tolerances& tol) {
  ApparencyCheck out;
  out.exponents = exponents(eq, point, tol);
  out.index = out.exponents.resonance_index();
  if (!out.index) return out;
  const LocalExpansion s = frobenius_series(eq, point, out.exponents.lambda1, *out.index, tol);
  out.consistency = s.consistency;
  out.apparent = s.status != SeriesStatus::LogarithmicNeeded;
  return out;
}

std::optional<bool> apparency(const QDiffEquation& eq, BasePoint point, const Tolerances& tol) {
  return check_apparency(eq, point, tol).apparent;
}

SingularityReport analyze(const QDiffEquation& eq, BasePoint point, const Tolerances& tol) {
  SingularityReport r;
  r.point = point;
  r.is_regular = classify(eq, point);
  if (!r.is_regular) return r;
  const auto check = check_apparency(eq, point, tol);
  r.exponents = check.exponents;
  r.apparent = check.apparent;
  return r;
}

Scalar ResidualProfile::relative(std::size_t n) const {
  if (n >= magnitude.size()) return 0.0;
  if (scale[n] == 0.0) return magnitude[n] == 0.0 ? 0.0 : INFINITY;
  return magnitude[n] / scale[n];
}

Scalar ResidualProfile::max_relative(std::size_t upto) const {
  Scalar m = 0.0;
  for (std::size_t n = 0; n <= upto && n < magnitude.size(); ++n) m = std::max(m, relative(n));
  return m;
}

ResidualProfile residual_profile(const QDiffEquation& eq, const LocalExpansion& expansion) {
  const LaurentPoly g = expansion.polynomial();
  const LaurentPoly r = apply_equation_offset(eq, expansion.offset(), g);
  const LaurentPoly s = apply_equation_magnitude(eq, expansion.offset(), g);
  ResidualProfile out;
  if (s.is_zero()) return out;
  const bool at_zero = expansion.point == BasePoint::Zero;
  int base = at_zero ? INT_MAX : INT_MIN;
  for (const LaurentPoly* p : {&eq.u, &eq.v, &eq.w}) {
    if (p->is_zero()) continue;
    base = at_zero ? std::min(base, p->lowest()) : std::max(base, p->highest());
  }
  const int span = at_zero ? s.highest() - base : base - s.lowest();
  for (int n = 0; n <= span; ++n) {
    const int k = at_zero ? base + n : base - n;
    out.magnitude.push_back(std::abs(r[k]));
    out.scale.push_back(s[k]);
  }
  return out;
}

}  // namespace qheun
