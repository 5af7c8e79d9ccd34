#include "qheun/characterize.hpp"

#include <cmath>

#include "qheun/error.hpp"
#include "qheun/local.hpp"

namespace qheun {

void VariantSkeleton::validate() const {
  if (family == Family::A4) throw Error(ErrorKind::InvalidParams, "a variant skeleton must be A3 or A2");
  params().validate();
}

ModelParams VariantSkeleton::params() const {
  ModelParams p;
  p.family = family;
  p.q = q;
  p.h = h;
  p.l = l;
  p.t = t;
  p.beta = beta;
  p.E = E;
  return p;
}

namespace {

struct Sides {
  LaurentPoly a;
  LaurentPoly c;
};

Sides sides(const VariantSkeleton& sk) {
  std::vector<Scalar> up, lo;
  for (std::size_t i = 0; i < sk.t.size(); ++i) {
    up.push_back(qpow(sk.q, sk.h[i] + 0.5) * sk.t[i]);
    lo.push_back(qpow(sk.q, sk.l[i] - 0.5) * sk.t[i]);
  }
  return {from_roots(up), from_roots(lo)};
}

Scalar log_q(Scalar q, Scalar ratio) {
  if (!(ratio > 0.0)) throw Error(ErrorKind::NonRealExponent, "exponent condition has no real solution");
  return std::log(ratio) / std::log(q);
}

int e_slot(Family family) { return family == Family::A2 ? 2 : 1; }

// Exponents mu, mu + 1 at infinity: the characteristic equations
// q^mu a_N + b_N + q^-mu c_N = 0 at mu and mu + 1 differ by a factor
// (1 - q) that cancels, leaving q^(2 mu + 1) = c_N / a_N.
struct InfinityData {
  Scalar mu;
  Scalar bN;
  Scalar bN1;
};

InfinityData infinity_conditions(const Sides& s, Scalar q) {
  const int n = s.a.highest();
  const Scalar aN = s.a[n];
  const Scalar cN = s.c[n];
  const Scalar mu = (log_q(q, cN / aN) - 1.0) / 2.0;
  const Scalar up = qpow(q, mu);
  InfinityData d;
  d.mu = mu;
  d.bN = -(aN * up + cN / up);
  // Apparency: the n = 1 consistency sum from the smaller exponent mu.
  d.bN1 = -(s.a[n - 1] * up + s.c[n - 1] / up);
  return d;
}

}  // namespace

DerivedA3 derive_b_A3(const VariantSkeleton& sk) {
  sk.validate();
  if (sk.family != Family::A3) throw Error(ErrorKind::InvalidParams, "derive_b_A3 needs an A3 skeleton");
  if (sk.beta == 0.0) throw Error(ErrorKind::DegenerateBeta, "exponent difference beta must be nonzero");
  const Scalar q = sk.q;
  const Sides s = sides(sk);
  const Scalar a0 = s.a[0];
  const Scalar c0 = s.c[0];
  DerivedA3 d;
  // q^-lambda a0 + b0 + q^lambda c0 = 0 at lambda and lambda + beta; the
  // difference factors as (a0 q^-lambda - c0 q^(lambda+beta)) (1 - q^-beta).
  d.lambda = (log_q(q, a0 / c0) - sk.beta) / 2.0;
  d.b0 = -(a0 * qpow(q, -d.lambda) + c0 * qpow(q, d.lambda));
  const InfinityData inf = infinity_conditions(s, q);
  d.b3 = inf.bN;
  d.b2 = inf.bN1;
  return d;
}

DerivedA2 derive_b_A2(const VariantSkeleton& sk) {
  sk.validate();
  if (sk.family != Family::A2) throw Error(ErrorKind::InvalidParams, "derive_b_A2 needs an A2 skeleton");
  const Scalar q = sk.q;
  const Sides s = sides(sk);
  const Scalar a0 = s.a[0];
  const Scalar c0 = s.c[0];
  DerivedA2 d;
  d.lambda = (log_q(q, a0 / c0) - 1.0) / 2.0;
  const Scalar up = qpow(q, d.lambda);
  d.b0 = -(a0 / up + c0 * up);
  // Apparency at 0: the n = 1 consistency sum from lambda is linear in b1.
  d.b1 = -(s.a[1] / up + s.c[1] * up);
  const InfinityData inf = infinity_conditions(s, q);
  d.b4 = inf.bN;
  d.b3 = inf.bN1;
  return d;
}

QDiffEquation skeleton_equation(const VariantSkeleton& sk, const std::map<int, Scalar>& b) {
  sk.validate();
  const Sides s = sides(sk);
  std::map<int, Scalar> v = b;
  v[e_slot(sk.family)] = -sk.E;
  QDiffEquation eq{s.a, LaurentPoly(v), s.c, sk.q, normalization_power(sk.family)};
  return eq;
}

QDiffEquation derived_equation(const VariantSkeleton& sk) {
  if (sk.family == Family::A3) {
    const DerivedA3 d = derive_b_A3(sk);
    return skeleton_equation(sk, {{3, d.b3}, {2, d.b2}, {0, d.b0}});
  }
  const DerivedA2 d = derive_b_A2(sk);
  return skeleton_equation(sk, {{4, d.b4}, {3, d.b3}, {1, d.b1}, {0, d.b0}});
}

bool CharacterizationReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) return false;
  }
  return !conditions.empty();
}

namespace {

ConditionResult difference_condition(const std::string& name, const QDiffEquation& eq, BasePoint point,
                                     Scalar expected, const Tolerances& tol) {
  ConditionResult r{name, false, expected, 0.0, 0.0, {}};
  try {
    const ExponentPair ex = exponents(eq, point, tol);
    r.observed = ex.difference;
    r.residual = std::abs(ex.difference - expected);
    r.pass = r.residual < tol.integrality;
  } catch (const Error& e) {
    r.note = std::string(to_string(e.kind())) + ": " + e.what();
    r.residual = INFINITY;
  }
  return r;
}

ConditionResult apparency_condition(const std::string& name, const QDiffEquation& eq, BasePoint point,
                                    const Tolerances& tol) {
  ConditionResult r{name, false, 1.0, 0.0, 0.0, {}};
  try {
    const ApparencyCheck check = check_apparency(eq, point, tol);
    if (!check.apparent) {
      r.note = "exponent difference is not a positive integer";
      r.residual = INFINITY;
      return r;
    }
    r.observed = *check.apparent ? 1.0 : 0.0;
    r.residual = check.consistency;
    r.pass = *check.apparent;
  } catch (const Error& e) {
    r.note = std::string(to_string(e.kind())) + ": " + e.what();
    r.residual = INFINITY;
  }
  return r;
}

}  // namespace

CharacterizationReport check_conditions(Family family, const QDiffEquation& eq, Scalar beta,
                                        const Tolerances& tol) {
  CharacterizationReport rep;
  rep.family = family;
  if (family == Family::A3) {
    rep.conditions.push_back(difference_condition("exponent_difference_zero", eq, BasePoint::Zero, std::abs(beta), tol));
    rep.conditions.push_back(difference_condition("exponent_difference_infinity", eq, BasePoint::Infinity, 1.0, tol));
    rep.conditions.push_back(apparency_condition("apparent_infinity", eq, BasePoint::Infinity, tol));
  } else if (family == Family::A2) {
    rep.conditions.push_back(difference_condition("exponent_difference_zero", eq, BasePoint::Zero, 1.0, tol));
    rep.conditions.push_back(difference_condition("exponent_difference_infinity", eq, BasePoint::Infinity, 1.0, tol));
    rep.conditions.push_back(apparency_condition("apparent_zero", eq, BasePoint::Zero, tol));
    rep.conditions.push_back(apparency_condition("apparent_infinity", eq, BasePoint::Infinity, tol));
  } else {
    throw Error(ErrorKind::InvalidParams, "characterization applies to A3 and A2 only");
  }
  return rep;
}

CharacterizationReport verify_characterization(const VariantSkeleton& sk, const Tolerances& tol) {
  return check_conditions(sk.family, derived_equation(sk), sk.beta, tol);
}

}  // namespace qheun
