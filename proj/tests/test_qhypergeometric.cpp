#include <doctest.h>

#include <cmath>

#include "qheun/error.hpp"
#include "qheun/local.hpp"
#include "qheun/operator.hpp"
#include "qheun/qhypergeometric.hpp"
#include "support.hpp"

using namespace qheun;
using qheun::testing::Rng;
using qheun::testing::rel_err;

namespace {

double Q(double q, double s) { return std::pow(q, s); }

ModelParams reducible(Rng& rng) {
  ModelParams p = rng.params(Family::A4);
  p.q = rng.uniform(0.3, 0.8);
  p.l[1] = p.h[1] + 1.0;
  // Accessory value for which the factorization holds.
  p.E = -(Q(p.q, p.alpha1) + Q(p.q, p.alpha2)) * Q(p.q, p.h[1] + 0.5) * p.t[1] -
        Q(p.q, (p.h[0] - p.h[1] + p.l[0] + p.l[1] + p.alpha1 + p.alpha2 - 1) / 2) *
            (Q(p.q, p.beta / 2) + Q(p.q, -p.beta / 2)) * p.t[0];
  return p;
}

// Relative residual of the standard-form equation on the series through
// degree `upto`.
double standard_residual(const QDiffEquation& eq, const LaurentPoly& f, int upto) {
  const LaurentPoly r = apply_equation(eq, f);
  const LaurentPoly m = apply_equation_magnitude(eq, 0.0, f);
  double worst = 0.0;
  for (int n = 0; n <= upto; ++n) {
    if (m[n] > 0.0) worst = std::max(worst, std::abs(r[n]) / m[n]);
  }
  return worst;
}

}  // namespace

TEST_CASE("q-Pochhammer symbol") {
  CHECK(q_pochhammer(0.3, 0.5, 0) == 1.0);
  CHECK(q_pochhammer(0.3, 0.5, 3) == doctest::Approx((1 - 0.3) * (1 - 0.15) * (1 - 0.075)));
  CHECK(q_pochhammer(4.0, 0.5, 3) == doctest::Approx(0.0));
}

TEST_CASE("series coefficients obey the term ratio") {
  Rng rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const double q = rng.uniform(0.2, 0.9);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(-2, -0.1);
    const LaurentPoly f = q_hypergeometric_series(a, b, c, q, 30);
    CHECK(f[0] == 1.0);
    for (int n = 1; n < 30; ++n) {
      const double expected = q_pochhammer(a, q, n) * q_pochhammer(b, q, n) /
                              (q_pochhammer(q, q, n) * q_pochhammer(c, q, n));
      CHECK(rel_err(f[n], expected) < 1e-12);
      // phi_{n-1} [q^-(n-1) - (a+b) + ab q^(n-1)] + phi_n [-q^(1-n) + q + c - c q^n] = 0,
      // the coefficient recurrence of the standard form after dividing by q^-(n-1).
      const double lhs = f[n - 1] * (Q(q, -(n - 1)) - (a + b) + a * b * Q(q, n - 1)) +
                         f[n] * (-Q(q, 1 - n) + q + c - c * Q(q, n));
      const double scale = std::abs(f[n - 1]) * (Q(q, -(n - 1)) + std::abs(a + b) + std::abs(a * b) * Q(q, n - 1)) +
                           std::abs(f[n]) * (Q(q, 1 - n) + q + std::abs(c) + std::abs(c) * Q(q, n));
      CHECK(std::abs(lhs) / scale < 1e-13);
    }
  }
}

TEST_CASE("q-binomial theorem") {
  // 2phi1(a, b; b; x) = (ax; q)_inf / (x; q)_inf
  const double q = 0.6, a = 0.35, b = -0.7, x = 0.3;
  const LaurentPoly f = q_hypergeometric_series(a, b, b, q, 120);
  double sum = 0.0;
  for (const auto& [k, c] : f.terms()) sum += c * std::pow(x, k);
  double num = 1.0, den = 1.0;
  for (int i = 0; i < 400; ++i) {
    num *= 1 - a * x * Q(q, i);
    den *= 1 - x * Q(q, i);
  }
  CHECK(rel_err(sum, num / den) < 1e-13);
}

TEST_CASE("series satisfies the standard form") {
  Rng rng(72);
  for (int trial = 0; trial < 30; ++trial) {
    const double q = rng.q();
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(0.1, 3.0) * rng.sign();
    const LaurentPoly f = q_hypergeometric_series(a, b, c, q, 30);
    const QDiffEquation eq = q_hypergeometric_equation(a, b, c, q);
    CHECK(standard_residual(eq, f, 29) < 1e-10);
    // Truncation shows up at degree 30 only.
    const LaurentPoly r = apply_equation(eq, f);
    CHECK(r.highest() <= 31);
  }
}

TEST_CASE("Pochhammer pole in the denominator") {
  const double q = 0.5;
  try {
    q_hypergeometric_series(0.3, 0.4, Q(q, -2), q, 10);
    FAIL("expected PochhammerPole");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PochhammerPole);
  }
  // Fewer terms than the pole index are fine.
  CHECK_NOTHROW(q_hypergeometric_series(0.3, 0.4, Q(q, -2), q, 3));
}

TEST_CASE("synthetic division") {
  const std::vector<double> r{2.0, -0.5, 1.5};
  const LaurentPoly p = from_roots(r, 1.7);
  const LinearDivision d = divide_linear(p, 2.0);
  CHECK(std::abs(d.remainder) < 1e-14);
  const LaurentPoly back = d.quotient * from_roots(std::vector<double>{2.0});
  CHECK((back - p).max_abs() < 1e-14);
  const LinearDivision e = divide_linear(p, 3.0);
  double value = 0.0;
  for (const auto& [k, c] : p.terms()) value += c * std::pow(3.0, k);
  CHECK(e.remainder == doctest::Approx(value));
  CHECK_THROWS_AS(divide_linear(LaurentPoly::monomial(-1), 1.0), Error);
}

TEST_CASE("reducible accessory matches the closed form") {
  Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = reducible(rng);
    CHECK(rel_err(reducible_accessory(p), p.E) < 1e-14);
  }
}

TEST_CASE("reduction divides out the common factor and the 2phi1 solves it") {
  Rng rng(74);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = reducible(rng);
    const HypergeometricReduction red = reduce_to_q_hypergeometric(p);
    CHECK(red.remainder < 1e-10);
    CHECK(rel_err(red.root, Q(p.q, p.h[1] + 0.5) * p.t[1]) < 1e-14);

    // (x - root) * divided == original
    const QDiffEquation eq = build_equation(p);
    const LaurentPoly factor = from_roots(std::vector<double>{red.root});
    const double scale = std::max({eq.u.max_abs(), eq.v.max_abs(), eq.w.max_abs()});
    CHECK((factor * red.divided.u - eq.u).max_abs() / scale < 1e-12);
    CHECK((factor * red.divided.v - eq.v).max_abs() / scale < 1e-12);
    CHECK((factor * red.divided.w - eq.w).max_abs() / scale < 1e-12);

    const LaurentPoly f = q_hypergeometric_series(red.a, red.b, red.c, p.q, 30);
    CHECK(standard_residual(red.equation, f, 25) < 1e-10);

    // g(x) = x^nu f(x / scale) solves the original equation.
    const LaurentPoly g = f.scaled_argument(1.0 / red.scale);
    const LaurentPoly res = apply_equation_offset(eq, red.nu, g);
    const LaurentPoly mag = apply_equation_magnitude(eq, red.nu, g);
    double worst = 0.0;
    for (int n = 0; n <= 25; ++n) {
      if (mag[n] > 0.0) worst = std::max(worst, std::abs(res[n]) / mag[n]);
    }
    CHECK(worst < 1e-10);

    // nu is an exponent at 0.
    const ExponentPair ex = exponents(eq, BasePoint::Zero);
    CHECK(std::min(std::abs(red.nu - ex.lambda1), std::abs(red.nu - ex.lambda2)) < 1e-9);
  }
}

TEST_CASE("reduction preconditions") {
  Rng rng(75);
  ModelParams p = reducible(rng);
  ModelParams wrong_e = p;
  wrong_e.E += 0.5;
  ModelParams wrong_l = p;
  wrong_l.l[1] += 0.25;
  ModelParams wrong_family = rng.params(Family::A3);
  for (const ModelParams* bad : {&wrong_e, &wrong_l, &wrong_family}) {
    try {
      reduce_to_q_hypergeometric(*bad);
      FAIL("expected NotReducible");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotReducible);
    }
  }
}
