#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "qheun/laurent.hpp"
#include "qheun/params.hpp"

namespace qheun {

// Dense polynomial, coefficient of x^k at index k.
using Polynomial = std::vector<Scalar>;

Scalar evaluate(const Polynomial& p, Scalar x);

enum class LimitFamily { FromA3, FromA2 };

std::string_view to_string(LimitFamily family);
LimitFamily limit_family_from(Family family);

// Parameters that survive q -> 1: h, l, t (length 3 or 4), beta (A3 only)
// and the rescaled accessory parameter Etilde.
struct LimitSetup {
  LimitFamily family = LimitFamily::FromA3;
  std::vector<Scalar> h;
  std::vector<Scalar> l;
  std::vector<Scalar> t;
  Scalar beta = 0.0;
  Scalar Etilde = 0.0;

  void validate() const;
  Scalar ltilde() const;
  // E = 2 e2(t) + (q-1) E1 + (q-1)^2 Etilde with E1 = sum_{m<n} (h_m+h_n+l_m+l_n) t_m t_n.
  Scalar scaled_accessory(Scalar epsilon) const;
  // q-difference parameters at q = 1 + epsilon.
  ModelParams q_params(Scalar epsilon) const;
};

// p2(x) g'' + p1(x) g' + p0(x) g = 0.
struct FuchsianODE {
  LimitFamily family = LimitFamily::FromA3;
  std::vector<Scalar> h;
  std::vector<Scalar> l;
  std::vector<Scalar> t;
  Scalar beta = 0.0;
  Scalar ltilde = 0.0;
  Scalar Btilde = 0.0;
  Polynomial p2;
  Polynomial p1;
  Polynomial p0;
};

// Assembles the q -> 1 limit of the A3 or A2 equation divided by (q-1)^2,
// with the accessory coefficient Btilde given explicitly.
FuchsianODE limit_ode(const LimitSetup& setup, Scalar Btilde);

struct OdePoint {
  bool infinite = false;
  Scalar x = 0.0;

  static OdePoint at(Scalar x) { return {false, x}; }
  static OdePoint infinity() { return {true, 0.0}; }
};

// Indicial roots at a point, sorted ascending. At infinity the roots refer
// to g ~ (1/x)^rho. Throws IrregularPoint or NonRealExponent.
std::array<Scalar, 2> indicial_exponents(const FuchsianODE& ode, OdePoint point);

// Frobenius coefficients c_0..c_order (c_0 = 1) of g = z^rho sum c_n z^n with
// z = x - x0, or z = 1/x at infinity. A resonance is resolved with c_n = 0
// when consistent; otherwise ResonantLogarithmic is thrown.
std::vector<Scalar> ode_frobenius(const FuchsianODE& ode, OdePoint point, Scalar exponent, int order);

struct SchemeColumn {
  OdePoint point;
  std::array<Scalar, 2> computed;  // from the assembled ODE
  std::array<Scalar, 2> expected;  // Riemann scheme of the limit equation
};

std::vector<SchemeColumn> riemann_scheme(const FuchsianODE& ode);

struct LimitSample {
  Scalar epsilon = 0.0;
  Scalar q_exponent = 0.0;
  Scalar exponent_gap = 0.0;     // |q exponent - ODE indicial exponent|
  Scalar fitted_offset = 0.0;    // Btilde - Etilde matching the fit coefficient at this epsilon
  std::vector<Scalar> q_coeffs;  // q-Frobenius coefficients at 0
  std::vector<Scalar> differences;  // |c_n(q) - c_n(ODE)|, n = 0..order
};

struct LimitReport {
  LimitFamily family = LimitFamily::FromA3;
  Scalar exponent = 0.0;  // exponent at 0 used for both series
  int fit_index = 0;      // first coefficient that depends on Btilde
  std::vector<LimitSample> samples;
  // Offset extrapolated to epsilon -> 0 from the two smallest samples.
  Scalar offset = 0.0;
  // max |fitted_offset - offset| / epsilon over the samples.
  Scalar offset_stability = 0.0;
  std::vector<Scalar> ode_coeffs;  // with Btilde = Etilde + offset
  // Least-squares slope of log|difference| against log epsilon, per
  // coefficient n = 1..order. NaN when a difference vanishes.
  std::vector<Scalar> slopes;
};

// Compares q-Frobenius series at x = 0 (module local) with the ODE Frobenius
// series as q = 1 + epsilon -> 1. epsilons must lie in (0, 0.1] and descend.
LimitReport verify_limit(const LimitSetup& setup, const std::vector<Scalar>& epsilons, int order);

struct HeunForm {
  Scalar t = 0.0;
  Scalar gamma = 0.0;
  Scalar delta = 0.0;
  Scalar epsilon = 0.0;
  Scalar alphaP = 0.0;
  Scalar betaP = 0.0;
  bool accessory_offset_known = false;

  // gamma + delta + epsilon - (alphaP + betaP + 1)
  Scalar fuchs_defect() const { return gamma + delta + epsilon - (alphaP + betaP + 1.0); }
};

HeunForm to_heun_form(const FuchsianODE& ode);

}  // namespace qheun
