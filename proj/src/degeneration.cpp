#include "qheun/degeneration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qheun/error.hpp"
#include "qheun/local.hpp"
#include "qheun/operator.hpp"

namespace qheun {

Scalar evaluate(const Polynomial& p, Scalar x) {
  Scalar s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

std::string_view to_string(LimitFamily family) { return family == LimitFamily::FromA3 ? "fromA3" : "fromA2"; }

LimitFamily limit_family_from(Family family) {
  if (family == Family::A3) return LimitFamily::FromA3;
  if (family == Family::A2) return LimitFamily::FromA2;
  throw Error(ErrorKind::InvalidParams, "q -> 1 limits are available for A3 and A2");
}

namespace {

std::size_t size_of(LimitFamily f) { return f == LimitFamily::FromA3 ? 3 : 4; }

Polynomial mul(const Polynomial& a, const Polynomial& b) {
  if (a.empty() || b.empty()) return {};
  Polynomial out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Polynomial add(Polynomial a, const Polynomial& b, Scalar s = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

Polynomial roots_product(const std::vector<Scalar>& roots, std::optional<std::size_t> skip = std::nullopt) {
  Polynomial p{1.0};
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (skip && *skip == i) continue;
    p = mul(p, {-roots[i], 1.0});
  }
  return p;
}

// Coefficients of p(x0 + z).
Polynomial taylor_shift(Polynomial p, Scalar x0) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = n - 1; j > i; --j) p[j - 1] += x0 * p[j];
  }
  return p;
}

// Local form z^2 A(z) G'' + z B(z) G' + C(z) G = 0 at z = 0.
struct LocalOde {
  Polynomial A, B, C;

  Scalar a(std::size_t k) const { return k < A.size() ? A[k] : 0.0; }
  Scalar b(std::size_t k) const { return k < B.size() ? B[k] : 0.0; }
  Scalar c(std::size_t k) const { return k < C.size() ? C[k] : 0.0; }

  Scalar indicial(Scalar rho) const { return rho * (rho - 1) * a(0) + rho * b(0) + c(0); }
  Scalar term(std::size_t k, Scalar rho) const { return rho * (rho - 1) * a(k) + rho * b(k) + c(k); }
};

int vanishing_order(const Polynomial& p) {
  Scalar scale = 0.0;
  for (Scalar c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 1 << 20;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::abs(p[k]) > 1e-11 * scale) return static_cast<int>(k);
  }
  return 1 << 20;
}

LocalOde localize(const FuchsianODE& ode, OdePoint point) {
  Polynomial q2, q1, q0;
  if (!point.infinite) {
    q2 = taylor_shift(ode.p2, point.x);
    q1 = taylor_shift(ode.p1, point.x);
    q0 = taylor_shift(ode.p0, point.x);
  } else {
    // x = 1/z, g' = -z^2 G', g'' = z^4 G'' + 2 z^3 G'; multiply through by z^D.
    const std::size_t D = ode.p2.size() - 1;
    Polynomial r2(D + 1, 0.0), s1(D + 1, 0.0), s0(D + 1, 0.0);
    for (std::size_t k = 0; k <= D; ++k) {
      r2[D - k] = ode.p2[k];
      if (k < ode.p1.size()) s1[D - k] = ode.p1[k];
      if (k < ode.p0.size()) s0[D - k] = ode.p0[k];
    }
    q2 = mul({0, 0, 0, 0, 1.0}, r2);
    q1 = add(mul({0, 0, 0, 2.0}, r2), mul({0, 0, 1.0}, s1), -1.0);
    q0 = s0;
  }
  const int m = vanishing_order(q2);
  if (m > static_cast<int>(q2.size()) || vanishing_order(q1) < m - 1 || vanishing_order(q0) < m - 2) {
    throw Error(ErrorKind::IrregularPoint, "point is not a regular singularity of the ODE");
  }
  // Multiply by z^(2-m): A_k = q2[k+m], B_k = q1[k+m-1], C_k = q0[k+m-2].
  LocalOde out;
  auto pick = [](const Polynomial& p, int start) {
    Polynomial r;
    for (int k = std::max(start, 0); k < static_cast<int>(p.size()); ++k) r.push_back(p[static_cast<std::size_t>(k)]);
    if (start < 0) r.insert(r.begin(), static_cast<std::size_t>(-start), 0.0);
    return r;
  };
  out.A = pick(q2, m);
  out.B = pick(q1, m - 1);
  out.C = pick(q0, m - 2);
  return out;
}

std::array<Scalar, 2> solve_indicial(const LocalOde& lo) {
  // a0 rho^2 + (b0 - a0) rho + c0 = 0
  const Scalar A = lo.a(0), B = lo.b(0) - lo.a(0), C = lo.c(0);
  Scalar disc = B * B - 4 * A * C;
  if (disc < 0.0) {
    if (-disc > 1e-12 * (B * B + std::abs(4 * A * C))) throw Error(ErrorKind::NonRealExponent, "complex indicial roots");
    disc = 0.0;
  }
  const Scalar root = std::sqrt(disc);
  const Scalar big = B >= 0 ? -(B + root) / 2 : -(B - root) / 2;
  Scalar r1 = big / A;
  Scalar r2 = big != 0.0 ? C / big : r1;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace

void LimitSetup::validate() const {
  const std::size_t n = size_of(family);
  if (h.size() != n || l.size() != n || t.size() != n) {
    throw Error(ErrorKind::InvalidParams, "h, l, t must have length " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i] == 0.0) throw Error(ErrorKind::CoincidentSingularities, "singularity t" + std::to_string(i + 1) + " coincides with 0");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (t[i] == t[j]) {
        throw Error(ErrorKind::CoincidentSingularities,
                    "singularities t" + std::to_string(i + 1) + " and t" + std::to_string(j + 1) + " coincide");
      }
    }
  }
}

Scalar LimitSetup::ltilde() const {
  const Scalar D = std::accumulate(h.begin(), h.end(), 0.0) - std::accumulate(l.begin(), l.end(), 0.0);
  return family == LimitFamily::FromA3 ? (D + 2) / 2 : (D + 3) / 2;
}

Scalar LimitSetup::scaled_accessory(Scalar eps) const {
  Scalar e2 = 0.0, e1 = 0.0;
  for (std::size_t m = 0; m < t.size(); ++m) {
    for (std::size_t n = m + 1; n < t.size(); ++n) {
      e2 += t[m] * t[n];
      e1 += (h[m] + h[n] + l[m] + l[n]) * t[m] * t[n];
    }
  }
  return 2 * e2 + eps * e1 + eps * eps * Etilde;
}

ModelParams LimitSetup::q_params(Scalar eps) const {
  ModelParams p;
  p.family = family == LimitFamily::FromA3 ? Family::A3 : Family::A2;
  p.q = 1.0 + eps;
  p.h = h;
  p.l = l;
  p.t = t;
  p.beta = family == LimitFamily::FromA3 ? beta : 0.0;
  p.E = scaled_accessory(eps);
  return p;
}

FuchsianODE limit_ode(const LimitSetup& s, Scalar Btilde) {
  s.validate();
  FuchsianODE ode;
  ode.family = s.family;
  ode.h = s.h;
  ode.l = s.l;
  ode.t = s.t;
  ode.beta = s.family == LimitFamily::FromA3 ? s.beta : 0.0;
  ode.ltilde = s.ltilde();
  ode.Btilde = Btilde;
  const std::size_t n = s.t.size();
  const Scalar lt = ode.ltilde;
  const Scalar T = std::accumulate(s.t.begin(), s.t.end(), 1.0, std::multiplies<>());

  const Polynomial P = roots_product(s.t);
  ode.p2 = mul({0, 0, 1.0}, P);
  Polynomial p1 = mul({0, -2 * lt}, P);
  for (std::size_t i = 0; i < n; ++i) {
    p1 = add(p1, mul({0, 0, s.h[i] - s.l[i] + 1}, roots_product(s.t, i)));
  }
  ode.p1 = p1;

  Scalar lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) lin += (2 * s.h[i] - 2 * s.l[i] + 1) * s.t[i];
  Polynomial bracket;
  if (s.family == LimitFamily::FromA3) {
    const Scalar c0 = T * (lt + 0.5 + s.beta / 2) * (lt + 0.5 - s.beta / 2);
    bracket = {c0, Btilde, lin / 4, 0.25};
  } else {
    Scalar inv = 0.0;
    for (std::size_t i = 0; i < n; ++i) inv += (lt - s.h[i] + s.l[i]) / s.t[i];
    bracket = {-T * lt * (lt + 1), T * lt * inv, Btilde, lin / 4, 0.25};
  }
  ode.p0 = add({}, bracket, -1.0);
  return ode;
}

std::array<Scalar, 2> indicial_exponents(const FuchsianODE& ode, OdePoint point) {
  return solve_indicial(localize(ode, point));
}

std::vector<Scalar> ode_frobenius(const FuchsianODE& ode, OdePoint point, Scalar exponent, int order) {
  if (order < 0) throw Error(ErrorKind::InvalidParams, "series order must be nonnegative");
  const LocalOde lo = localize(ode, point);
  const auto roots = solve_indicial(lo);
  const Scalar ind_scale =
      std::abs(lo.a(0)) * (1 + exponent * exponent) + std::abs(exponent * lo.b(0)) + std::abs(lo.c(0));
  if (std::abs(lo.indicial(exponent)) > 1e-8 * ind_scale) {
    throw Error(ErrorKind::ExponentMismatch, "exponent does not solve the indicial equation");
  }
  const Scalar other = std::abs(exponent - roots[0]) <= std::abs(exponent - roots[1]) ? roots[1] : roots[0];
  std::optional<int> resonance;
  const Scalar gap = other - exponent;
  if (std::abs(gap - std::round(gap)) < 1e-8 && std::lround(gap) >= 1) resonance = static_cast<int>(std::lround(gap));

  std::vector<Scalar> c{1.0};
  for (int n = 1; n <= order; ++n) {
    Scalar sum = 0.0, scale = 0.0;
    for (int k = 1; k <= n; ++k) {
      const Scalar prev = c[static_cast<std::size_t>(n - k)];
      const Scalar rho = exponent + n - k;
      const Scalar t = lo.term(static_cast<std::size_t>(k), rho) * prev;
      sum += t;
      scale += (std::abs(rho * (rho - 1) * lo.a(k)) + std::abs(rho * lo.b(k)) + std::abs(lo.c(k))) * std::abs(prev);
    }
    if (resonance && n == *resonance) {
      if (std::abs(sum) > 1e-9 * std::max(scale, 1e-300)) {
        throw Error(ErrorKind::ResonantLogarithmic, "resonance at index " + std::to_string(n) + " needs a logarithm");
      }
      c.push_back(0.0);
      continue;
    }
    c.push_back(-sum / lo.indicial(exponent + n));
  }
  return c;
}

std::vector<SchemeColumn> riemann_scheme(const FuchsianODE& ode) {
  auto sorted = [](Scalar a, Scalar b) { return a <= b ? std::array<Scalar, 2>{a, b} : std::array<Scalar, 2>{b, a}; };
  std::vector<SchemeColumn> cols;
  const Scalar lt = ode.ltilde;
  const auto zero = ode.family == LimitFamily::FromA3 ? sorted(lt + ode.beta / 2 + 0.5, lt - ode.beta / 2 + 0.5)
                                                      : sorted(lt, lt + 1);
  cols.push_back({OdePoint::at(0.0), indicial_exponents(ode, OdePoint::at(0.0)), zero});
  for (std::size_t i = 0; i < ode.t.size(); ++i) {
    const OdePoint p = OdePoint::at(ode.t[i]);
    cols.push_back({p, indicial_exponents(ode, p), sorted(0.0, ode.l[i] - ode.h[i])});
  }
  cols.push_back({OdePoint::infinity(), indicial_exponents(ode, OdePoint::infinity()), {-0.5, 0.5}});
  return cols;
}

LimitReport verify_limit(const LimitSetup& setup, const std::vector<Scalar>& epsilons, int order) {
  setup.validate();
  if (epsilons.size() < 2) throw Error(ErrorKind::InvalidParams, "verify_limit needs at least two epsilon values");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] <= 0.1)) throw Error(ErrorKind::InvalidParams, "epsilon must lie in (0, 0.1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw Error(ErrorKind::InvalidParams, "epsilons must descend");
  }
  if (order < 1) throw Error(ErrorKind::InvalidParams, "order must be at least 1");

  LimitReport rep;
  rep.family = setup.family;
  // Non-resonant exponent at 0: the larger one for A2, l~ + beta/2 + 1/2 for A3.
  const Scalar lt = setup.ltilde();
  rep.exponent = setup.family == LimitFamily::FromA3 ? lt + setup.beta / 2 + 0.5 : lt + 1;

  // Coefficients of the ODE series are affine in Btilde up to the first
  // index where Btilde enters; locate it with two probe values.
  auto ode_series = [&](Scalar offset) {
    return ode_frobenius(limit_ode(setup, setup.Etilde + offset), OdePoint::at(0.0), rep.exponent, order);
  };
  const auto probe0 = ode_series(0.0);
  const auto probe1 = ode_series(1.0);
  rep.fit_index = 0;
  for (int n = 1; n <= order; ++n) {
    if (std::abs(probe1[static_cast<std::size_t>(n)] - probe0[static_cast<std::size_t>(n)]) >
        1e-12 * std::max(1.0, std::abs(probe0[static_cast<std::size_t>(n)]))) {
      rep.fit_index = n;
      break;
    }
  }
  if (rep.fit_index == 0) throw Error(ErrorKind::ConvergenceFailure, "series does not depend on the accessory parameter");
  const auto fi = static_cast<std::size_t>(rep.fit_index);
  const Scalar slope = probe1[fi] - probe0[fi];

  const ModelParams ref = setup.q_params(epsilons.front());
  for (Scalar eps : epsilons) {
    const ModelParams p = setup.q_params(eps);
    const QDiffEquation eq = build_equation(p);
    LimitSample s;
    s.epsilon = eps;
    // The q-exponents at 0 do not depend on q.
    const ExponentPair ex = exponents(eq, BasePoint::Zero);
    s.q_exponent = std::abs(ex.lambda1 - rep.exponent) <= std::abs(ex.lambda2 - rep.exponent) ? ex.lambda1 : ex.lambda2;
    s.exponent_gap = std::abs(s.q_exponent - rep.exponent);
    const LocalExpansion series = frobenius_series(eq, BasePoint::Zero, s.q_exponent, order);
    if (series.status == SeriesStatus::LogarithmicNeeded) {
      throw Error(ErrorKind::ResonantLogarithmic, "q-series at 0 needs logarithmic terms");
    }
    s.q_coeffs = series.coeffs;
    s.fitted_offset = (s.q_coeffs[fi] - probe0[fi]) / slope;
    rep.samples.push_back(std::move(s));
  }
  (void)ref;

  // Richardson extrapolation of the offset from the two smallest epsilons.
  const auto& sa = rep.samples[rep.samples.size() - 2];
  const auto& sb = rep.samples.back();
  rep.offset = (sa.epsilon * sb.fitted_offset - sb.epsilon * sa.fitted_offset) / (sa.epsilon - sb.epsilon);
  for (const auto& s : rep.samples) {
    rep.offset_stability = std::max(rep.offset_stability, std::abs(s.fitted_offset - rep.offset) / s.epsilon);
  }

  rep.ode_coeffs = ode_series(rep.offset);
  for (auto& s : rep.samples) {
    s.differences.resize(static_cast<std::size_t>(order) + 1);
    for (std::size_t n = 0; n <= static_cast<std::size_t>(order); ++n) {
      s.differences[n] = std::abs(s.q_coeffs[n] - rep.ode_coeffs[n]);
    }
  }
  for (std::size_t n = 1; n <= static_cast<std::size_t>(order); ++n) {
    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool ok = true;
    for (const auto& s : rep.samples) {
      if (!(s.differences[n] > 0.0)) ok = false;
      const Scalar x = std::log(s.epsilon), y = std::log(s.differences[n]);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const auto m = static_cast<Scalar>(rep.samples.size());
    rep.slopes.push_back(ok ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : NAN);
  }
  return rep;
}

HeunForm to_heun_form(const FuchsianODE& ode) {
  const auto& t = ode.t;
  const auto& h = ode.h;
  const auto& l = ode.l;
  HeunForm f;
  Scalar den = 0.0;
  if (ode.family == LimitFamily::FromA3) {
    den = t[2] * (t[0] - t[1]);
    if (den == 0.0 || t[0] == t[2]) throw Error(ErrorKind::CoincidentSingularities, "cross-ratio degenerates");
    f.t = t[1] * (t[0] - t[2]) / den;
    f.gamma = 1 + h[0] - l[0];
    f.delta = 1 + h[1] - l[1];
    f.epsilon = 1 + h[2] - l[2];
    f.alphaP = ode.ltilde - ode.beta / 2;
    f.betaP = ode.ltilde + ode.beta / 2;
  } else {
    den = (t[3] - t[0]) * (t[2] - t[1]);
    if (den == 0.0 || t[3] == t[1] || t[2] == t[0]) throw Error(ErrorKind::CoincidentSingularities, "cross-ratio degenerates");
    f.t = (t[3] - t[1]) * (t[2] - t[0]) / den;
    f.gamma = 1 + h[1] - l[1];
    f.delta = 1 + h[2] - l[2];
    f.epsilon = 1 + h[3] - l[3];
    f.alphaP = ode.ltilde - 0.5;
    f.betaP = ode.ltilde - 0.5 + l[0] - h[0];
  }
  f.accessory_offset_known = false;
  return f;
}

}  // namespace qheun
