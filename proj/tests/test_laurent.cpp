#include <doctest.h>

#include <cmath>

#include "qheun/error.hpp"
#include "qheun/laurent.hpp"
#include "support.hpp"

using namespace qheun;
using qheun::testing::Rng;

namespace {

double eval(const LaurentPoly& p, double x) {
  double s = 0.0;
  for (const auto& [k, c] : p.terms()) s += c * std::pow(x, k);
  return s;
}

LaurentPoly random_poly(Rng& rng, int lo, int hi) {
  std::map<int, double> m;
  for (int k = lo; k <= hi; ++k) m[k] = rng.uniform(-2.0, 2.0);
  return LaurentPoly(m);
}

}  // namespace

TEST_CASE("zero coefficients are not stored") {
  LaurentPoly p({{-2, 1.0}, {0, 0.0}, {3, -4.0}});
  CHECK(p.terms().size() == 2);
  CHECK(p.lowest() == -2);
  CHECK(p.highest() == 3);
  CHECK(p[0] == 0.0);
  CHECK(p[3] == -4.0);
  p -= LaurentPoly::monomial(3, -4.0);
  CHECK(p.highest() == -2);
  p -= LaurentPoly::monomial(-2, 1.0);
  CHECK(p.is_zero());
}

TEST_CASE("dense round trip") {
  const std::vector<double> c{1.0, 0.0, -2.5, 3.0};
  const LaurentPoly p = LaurentPoly::from_dense(-1, c);
  CHECK(p.lowest() == -1);
  CHECK(p.dense() == c);
  CHECK(p.max_abs() == 3.0);
}

TEST_CASE("from_roots vanishes at its roots") {
  const std::vector<double> r{0.5, -1.25, 2.0};
  const LaurentPoly p = from_roots(r, 3.0);
  CHECK(p.highest() == 3);
  CHECK(p[3] == doctest::Approx(3.0));
  for (double x : r) CHECK(std::abs(eval(p, x)) < 1e-13);
  // Vieta: constant term is -prefactor * product of roots
  CHECK(p[0] == doctest::Approx(-3.0 * 0.5 * -1.25 * 2.0));
  CHECK(p[2] == doctest::Approx(-3.0 * (0.5 - 1.25 + 2.0)));
}

TEST_CASE("ring operations agree with pointwise evaluation") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const LaurentPoly a = random_poly(rng, rng.integer(-3, 0), rng.integer(0, 3));
    const LaurentPoly b = random_poly(rng, rng.integer(-3, 0), rng.integer(0, 3));
    const double x = rng.uniform(0.5, 1.5);
    const double s = rng.uniform(-2.0, 2.0);
    CHECK(eval(a + b, x) == doctest::Approx(eval(a, x) + eval(b, x)));
    CHECK(eval(a - b, x) == doctest::Approx(eval(a, x) - eval(b, x)));
    CHECK(eval(a * b, x) == doctest::Approx(eval(a, x) * eval(b, x)));
    CHECK(eval(s * a, x) == doctest::Approx(s * eval(a, x)));
    CHECK(eval(a.scaled_argument(s), x) == doctest::Approx(eval(a, s * x)));
    CHECK(eval(a.shifted(2), x) == doctest::Approx(x * x * eval(a, x)));
  }
}

TEST_CASE("apply_equation matches direct substitution") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    QDiffEquation eq;
    eq.q = rng.q();
    eq.u = random_poly(rng, 0, 2);
    eq.v = random_poly(rng, 0, 2);
    eq.w = random_poly(rng, 0, 2);
    const LaurentPoly g = random_poly(rng, -2, 4);
    const double x = rng.uniform(0.6, 1.4);
    const double direct = eval(eq.u, x) * eval(g, x / eq.q) + eval(eq.v, x) * eval(g, x) + eval(eq.w, x) * eval(g, eq.q * x);
    CHECK(eval(apply_equation(eq, g), x) == doctest::Approx(direct).epsilon(1e-10));

    // With an offset x^lambda the implicit factor is restored by hand.
    const double lambda = rng.uniform(-1.0, 1.0);
    auto G = [&](double y) { return std::pow(y, lambda) * eval(g, y); };
    const double direct_off = eval(eq.u, x) * G(x / eq.q) + eval(eq.v, x) * G(x) + eval(eq.w, x) * G(eq.q * x);
    CHECK(std::pow(x, lambda) * eval(apply_equation_offset(eq, lambda, g), x) ==
          doctest::Approx(direct_off).epsilon(1e-10));

    const LaurentPoly mag = apply_equation_magnitude(eq, lambda, g);
    const LaurentPoly res = apply_equation_offset(eq, lambda, g);
    for (const auto& [k, c] : res.terms()) CHECK(std::abs(c) <= mag[k] * (1 + 1e-14));
  }
}

TEST_CASE("qpow") {
  CHECK(qpow(2.0, 3.0) == doctest::Approx(8.0));
  CHECK(qpow(0.25, 0.5) == doctest::Approx(0.5));
  CHECK(qpow(3.0, 0.0) == 1.0);
}

TEST_CASE("equation validation") {
  QDiffEquation eq;
  eq.q = 1.0;
  eq.u = LaurentPoly::monomial(0);
  eq.w = LaurentPoly::monomial(0);
  CHECK_THROWS_AS(validate(eq), Error);
  eq.q = 0.5;
  CHECK_NOTHROW(validate(eq));
  eq.w = LaurentPoly();
  CHECK_THROWS_AS(validate(eq), Error);
}
