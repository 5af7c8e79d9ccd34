#include <doctest.h>

#include <cmath>

#include "qheun/characterize.hpp"
#include "qheun/error.hpp"
#include "qheun/operator.hpp"
#include "support.hpp"

using namespace qheun;
using qheun::testing::Rng;
using qheun::testing::rel_err;

namespace {

double Q(double q, double s) { return std::pow(q, s); }

VariantSkeleton random_skeleton(Rng& rng, Family f) {
  const ModelParams p = rng.params(f);
  VariantSkeleton sk;
  sk.family = f;
  sk.q = p.q;
  sk.h = p.h;
  sk.l = p.l;
  sk.t = p.t;
  sk.beta = p.beta;
  sk.E = p.E;
  return sk;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double prod(const std::vector<double>& v) {
  double s = 1.0;
  for (double x : v) s *= x;
  return s;
}

}  // namespace

TEST_CASE("derived A3 coefficients match the closed forms") {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const VariantSkeleton sk = random_skeleton(rng, Family::A3);
    const DerivedA3 d = derive_b_A3(sk);
    const double q = sk.q;
    double b2 = 0.0;
    for (int n = 0; n < 3; ++n) b2 += (Q(q, sk.h[n]) + Q(q, sk.l[n])) * sk.t[n];
    const double b0 = Q(q, (sum(sk.l) + sum(sk.h)) / 2) * (Q(q, sk.beta / 2) + Q(q, -sk.beta / 2)) * prod(sk.t);
    CHECK(rel_err(d.b3, -(Q(q, 0.5) + Q(q, -0.5))) < 1e-12);
    CHECK(rel_err(d.b2, b2) < 1e-12);
    CHECK(rel_err(d.b0, b0) < 1e-12);
    CHECK(rel_err(d.lambda, (sum(sk.h) - sum(sk.l) + 3 - sk.beta) / 2) < 1e-10);
  }
}

TEST_CASE("derived A2 coefficients match the closed forms") {
  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const VariantSkeleton sk = random_skeleton(rng, Family::A2);
    const DerivedA2 d = derive_b_A2(sk);
    const double q = sk.q;
    const double P = Q(q, (sum(sk.l) + sum(sk.h)) / 2) * prod(sk.t);
    double b3 = 0.0, inv = 0.0;
    for (int n = 0; n < 4; ++n) {
      b3 += (Q(q, sk.h[n]) + Q(q, sk.l[n])) * sk.t[n];
      inv += (Q(q, -sk.h[n]) + Q(q, -sk.l[n])) / sk.t[n];
    }
    CHECK(rel_err(d.b4, -(Q(q, 0.5) + Q(q, -0.5))) < 1e-12);
    CHECK(rel_err(d.b3, b3) < 1e-12);
    CHECK(rel_err(d.b1, P * inv) < 1e-12);
    CHECK(rel_err(d.b0, -P * (Q(q, 0.5) + Q(q, -0.5))) < 1e-12);
    CHECK(rel_err(d.lambda, (sum(sk.h) - sum(sk.l) + 3) / 2) < 1e-10);
  }
}

TEST_CASE("derived equations coincide with the operator equations") {
  Rng rng(53);
  for (Family f : {Family::A3, Family::A2}) {
    for (int trial = 0; trial < 20; ++trial) {
      const VariantSkeleton sk = random_skeleton(rng, f);
      const QDiffEquation a = derived_equation(sk);
      const QDiffEquation b = build_equation(sk.params());
      const double scale = std::max({b.u.max_abs(), b.v.max_abs(), b.w.max_abs()});
      CHECK((a.u - b.u).max_abs() / scale < 1e-12);
      CHECK((a.v - b.v).max_abs() / scale < 1e-12);
      CHECK((a.w - b.w).max_abs() / scale < 1e-12);
    }
  }
}

TEST_CASE("characterization passes on derived equations") {
  Rng rng(54);
  for (Family f : {Family::A3, Family::A2}) {
    for (int trial = 0; trial < 100; ++trial) {
      const VariantSkeleton sk = random_skeleton(rng, f);
      const CharacterizationReport rep = verify_characterization(sk);
      CHECK(rep.all_pass());
      CHECK(rep.conditions.size() == (f == Family::A3 ? 3u : 4u));
    }
  }
}

TEST_CASE("single coefficient perturbations break the characterization") {
  Rng rng(55);
  for (Family f : {Family::A3, Family::A2}) {
    const std::vector<int> slots = f == Family::A3 ? std::vector<int>{3, 2, 0} : std::vector<int>{4, 3, 1, 0};
    for (int trial = 0; trial < 50; ++trial) {
      const VariantSkeleton sk = random_skeleton(rng, f);
      const QDiffEquation eq = derived_equation(sk);
      for (int k : slots) {
        for (double sign : {1.0, -1.0}) {
          QDiffEquation bad = eq;
          bad.v += LaurentPoly::monomial(k, sign * 1e-3 * eq.v[k]);
          const CharacterizationReport rep = check_conditions(f, bad, sk.beta);
          CHECK_FALSE(rep.all_pass());
        }
      }
    }
  }
}

TEST_CASE("accessory parameter does not affect classification") {
  Rng rng(56);
  for (Family f : {Family::A3, Family::A2}) {
    VariantSkeleton sk = random_skeleton(rng, f);
    const QDiffEquation eq = derived_equation(sk);
    QDiffEquation bad = eq;
    const int k = f == Family::A3 ? 2 : 1;
    bad.v += LaurentPoly::monomial(k, 1e-3 * eq.v[k]);
    const CharacterizationReport bad0 = check_conditions(f, bad, sk.beta);
    for (int i = 0; i < 20; ++i) {
      sk.E = -10.0 + i;
      const CharacterizationReport rep = verify_characterization(sk);
      CHECK(rep.all_pass());
      QDiffEquation bad_e = bad;
      const int slot = normalization_power(f);
      bad_e.v += LaurentPoly::monomial(slot, -sk.E - bad_e.v[slot]);
      const CharacterizationReport repb = check_conditions(f, bad_e, sk.beta);
      REQUIRE(repb.conditions.size() == bad0.conditions.size());
      for (std::size_t c = 0; c < repb.conditions.size(); ++c) CHECK(repb.conditions[c].pass == bad0.conditions[c].pass);
    }
  }
}

TEST_CASE("characterization edge cases") {
  Rng rng(57);
  VariantSkeleton sk = random_skeleton(rng, Family::A3);
  sk.beta = 0.0;
  try {
    derive_b_A3(sk);
    FAIL("expected DegenerateBeta");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateBeta);
  }
  sk.beta = -0.4;
  CHECK(verify_characterization(sk).all_pass());
  VariantSkeleton a4 = random_skeleton(rng, Family::A3);
  a4.family = Family::A4;
  CHECK_THROWS_AS(a4.validate(), Error);
  VariantSkeleton shortv = random_skeleton(rng, Family::A2);
  shortv.t.pop_back();
  CHECK_THROWS_AS(shortv.validate(), Error);
}

TEST_CASE("skeleton_equation places E in its slot") {
  Rng rng(58);
  VariantSkeleton sk = random_skeleton(rng, Family::A2);
  sk.E = 2.5;
  const QDiffEquation eq = skeleton_equation(sk, {{4, 1.0}, {0, -1.0}});
  CHECK(eq.v[2] == doctest::Approx(-2.5));
  CHECK(eq.v[4] == 1.0);
  CHECK(eq.v[0] == -1.0);
  CHECK(eq.u.highest() == 4);
}
