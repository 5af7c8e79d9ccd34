#include <doctest.h>

#include <cmath>
#include <complex>

#include "qheun/error.hpp"
#include "qheun/operator.hpp"
#include "qheun/qes.hpp"
#include "support.hpp"

using namespace qheun;
using qheun::testing::Rng;
using qheun::testing::rel_err;

namespace {

double Q(double q, double s) { return std::pow(q, s); }

// Parameters hitting the integrality condition with top index n.
ModelParams constructed(Rng& rng, Family f, int n) {
  ModelParams p = rng.params(f);
  const double D = p.sum_h() - p.sum_l();
  switch (f) {
    case Family::A4:
      // lambda1 + alpha1 = -n
      p.alpha1 = -2.0 * n - (D - p.alpha2 - p.beta + 2);
      break;
    case Family::A3:
      // lambda1 = (D - beta + 3)/2 = 1/2 - n
      p.beta = D + 2 + 2.0 * n;
      break;
    case Family::A2:
      // (D + 3)/2 = 1/2 - n
      p.h[3] -= D + 2 + 2.0 * n;
      break;
  }
  return p;
}

const InvariantSubspace* find_n(const std::vector<InvariantSubspace>& subs, int n) {
  for (const auto& s : subs) {
    if (s.n == n) return &s;
  }
  return nullptr;
}

// One-dimensional eigenvalues written out term by term.
double one_dim_oracle(const ModelParams& p, double alpha) {
  const double q = p.q;
  if (p.family == Family::A4) {
    return -(Q(q, p.h[0] + 0.5) * p.t[0] + Q(q, p.h[1] + 0.5) * p.t[1]) * Q(q, alpha) -
           (Q(q, p.l[0] - 0.5) * p.t[0] + Q(q, p.l[1] - 0.5) * p.t[1]) * Q(q, p.alpha1 + p.alpha2 - alpha);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    for (std::size_t j = i + 1; j < p.t.size(); ++j) {
      s += (Q(q, p.h[i] + p.h[j] + 0.5) + Q(q, p.l[i] + p.l[j] - 0.5)) * p.t[i] * p.t[j];
    }
  }
  return s;
}

// (A - E) g with g = sum c_k x^(lambda+k), via the polynomial form.
double direct_residual(const ModelParams& p, double lambda, const EigenPair& e) {
  ModelParams pe = p;
  pe.E = e.eigenvalue.real();
  const QDiffEquation eq = build_equation(pe);
  std::map<int, double> m;
  for (std::size_t k = 0; k < e.coefficients.size(); ++k) m[static_cast<int>(k)] = e.coefficients[k].real();
  const LaurentPoly g(m);
  return apply_equation_offset(eq, lambda, g).max_abs() / apply_equation_magnitude(eq, lambda, g).max_abs();
}

}  // namespace

TEST_CASE("constructed subspaces close and their eigenpairs solve the equation") {
  Rng rng(61);
  for (Family f : qheun::testing::kFamilies) {
    for (int n : {0, 1, 2, 3, 5, 8}) {
      for (int trial = 0; trial < 5; ++trial) {
        ModelParams p = constructed(rng, f, n);
        p.q = rng.uniform(0.6, 0.9);
        const auto subs = find_subspaces(p);
        const InvariantSubspace* sub = find_n(subs, n);
        REQUIRE(sub != nullptr);
        CHECK(sub->closure_defect < 1e-10);
        CHECK(sub->dimension() == n + 1);
        CHECK(sub->matrix.rows() == n + 1);
        const auto pairs = eigenpairs(p, *sub);
        CHECK(pairs.size() == static_cast<std::size_t>(n + 1));
        for (const auto& e : pairs) {
          CHECK(e.residual < 1e-8);
          CHECK(eigenfunction_residual(p, sub->lambda, e) < 1e-8);
          if (std::abs(e.eigenvalue.imag()) < 1e-12) CHECK(direct_residual(p, sub->lambda, e) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("one-dimensional eigenvalues match the closed forms") {
  Rng rng(62);
  for (Family f : qheun::testing::kFamilies) {
    for (int trial = 0; trial < 30; ++trial) {
      const ModelParams p = constructed(rng, f, 0);
      const auto subs = find_subspaces(p);
      const InvariantSubspace* sub = find_n(subs, 0);
      REQUIRE(sub != nullptr);
      const double alpha = f == Family::A4 ? *sub->alpha : 0.0;
      if (f != Family::A4) CHECK(std::abs(sub->lambda - 0.5) < 1e-12);
      const double expected = one_dim_oracle(p, alpha);
      const auto pairs = eigenpairs(p, *sub);
      REQUIRE(pairs.size() == 1);
      CHECK(rel_err(pairs[0].eigenvalue.real(), expected) < 1e-12);
      CHECK(pairs[0].eigenvalue.imag() == 0.0);
      const double closed = f == Family::A4 ? one_dimensional_eigenvalue_A4(p, alpha) : one_dimensional_eigenvalue_variant(p);
      CHECK(rel_err(closed, expected) < 1e-12);
    }
  }
}

TEST_CASE("A4 eigenfunction with lambda1 = -alpha1") {
  // the eigenvalue in closed form
  Rng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = constructed(rng, Family::A4, 0);
    const double q = p.q;
    const double expected = -((Q(q, p.h[0] + 0.5) * p.t[0] + Q(q, p.h[1] + 0.5) * p.t[1]) * Q(q, p.alpha1) +
                              (Q(q, p.l[0] - 0.5) * p.t[0] + Q(q, p.l[1] - 0.5) * p.t[1]) * Q(q, p.alpha2));
    const double lambda1 = (p.sum_h() - p.sum_l() - p.alpha1 - p.alpha2 - p.beta) / 2 + 1;
    CHECK(std::abs(lambda1 + p.alpha1) < 1e-12);
    const Eigen::MatrixXd m = operator_matrix(p, lambda1, 0);
    CHECK(rel_err(m(0, 0), expected) < 1e-12);
  }
}

TEST_CASE("matrix columns are the operator image of the basis") {
  Rng rng(64);
  for (Family f : qheun::testing::kFamilies) {
    ModelParams p = constructed(rng, f, 4);
    p.E = 0.0;
    const auto subs = find_subspaces(p);
    const InvariantSubspace* sub = find_n(subs, 4);
    REQUIRE(sub != nullptr);
    const QDiffEquation eq = build_equation(p);
    const int np = normalization_power(f);
    for (int k = 0; k <= 4; ++k) {
      const LaurentPoly img = apply_equation_offset(eq, sub->lambda, LaurentPoly::monomial(k));
      const double scale = apply_equation_magnitude(eq, sub->lambda, LaurentPoly::monomial(k)).max_abs();
      for (int row = 0; row <= 4; ++row) CHECK(std::abs(sub->matrix(row, k) - img[row + np]) / scale < 1e-12);
      // Nothing leaves the span.
      for (const auto& [deg, c] : img.terms()) {
        const int row = deg - np;
        if (row < 0 || row > 4) CHECK(std::abs(c) / scale < 1e-12);
      }
    }
  }
}

TEST_CASE("eigenvalue invariants: trace and determinant") {
  Rng rng(65);
  for (Family f : qheun::testing::kFamilies) {
    for (int n : {1, 2, 3, 5}) {
      const ModelParams p = constructed(rng, f, n);
      const InvariantSubspace* sub = nullptr;
      const auto subs = find_subspaces(p);
      sub = find_n(subs, n);
      REQUIRE(sub != nullptr);
      std::complex<double> tr = 0.0, det = 1.0;
      for (const auto& e : eigenpairs(sub->matrix)) {
        tr += e.eigenvalue;
        det *= e.eigenvalue;
      }
      const double mscale = sub->matrix.cwiseAbs().maxCoeff();
      CHECK(std::abs(tr - sub->matrix.trace()) / mscale < 1e-10);
      CHECK(std::abs(det.imag()) / std::pow(mscale, n + 1) < 1e-9);
      CHECK(std::abs(det.real() - sub->matrix.determinant()) / std::pow(mscale, n + 1) < 1e-9);
    }
  }
}

TEST_CASE("3x3 eigenvalues against a Durand-Kerner oracle") {
  Rng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = constructed(rng, qheun::testing::kFamilies[trial % 3], 2);
    const auto subs = find_subspaces(p);
    const InvariantSubspace* sub = find_n(subs, 2);
    REQUIRE(sub != nullptr);
    const Eigen::MatrixXd& m = sub->matrix;
    // det(zI - M) = z^3 - c2 z^2 + c1 z - c0
    const double c2 = m.trace();
    const double c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                      m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double c0 = m.determinant();
    auto poly = [&](std::complex<double> z) { return ((z - c2) * z + c1) * z - c0; };
    std::complex<double> r[3] = {{0.4, 0.9}, {0.4, 0.9}, {0.4, 0.9}};
    r[1] = r[0] * r[0];
    r[2] = r[1] * r[0];
    const double s = 1.0 + std::abs(c2) + std::abs(c1) + std::abs(c0);
    for (auto& z : r) z *= s;
    for (int it = 0; it < 500; ++it) {
      for (int i = 0; i < 3; ++i) {
        std::complex<double> den = 1.0;
        for (int j = 0; j < 3; ++j) {
          if (j != i) den *= r[i] - r[j];
        }
        r[i] -= poly(r[i]) / den;
      }
    }
    const auto pairs = eigenpairs(m);
    for (const auto& e : pairs) {
      double best = 1e300;
      for (const auto& z : r) best = std::min(best, std::abs(z - e.eigenvalue));
      CHECK(best / s < 1e-9);
    }
  }
}

TEST_CASE("eigenpair normalization and ordering") {
  Eigen::MatrixXd m(3, 3);
  m << 2, 1, 0, 0, 3, 1, 0, 0, -1;
  const auto pairs = eigenpairs(m);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].eigenvalue.real() == doctest::Approx(-1));
  CHECK(pairs[1].eigenvalue.real() == doctest::Approx(2));
  CHECK(pairs[2].eigenvalue.real() == doctest::Approx(3));
  for (const auto& e : pairs) {
    std::size_t first = 0;
    while (std::abs(e.coefficients[first]) == 0.0) ++first;
    CHECK(std::abs(e.coefficients[first] - 1.0) < 1e-14);
    CHECK(e.residual < 1e-14);
  }
}

TEST_CASE("generic parameters have no subspace and closure is enforced") {
  Rng rng(67);
  for (Family f : qheun::testing::kFamilies) {
    ModelParams p = rng.params(f);
    if (f == Family::A3) p.beta = 0.123;
    if (f == Family::A2) p.h[0] += 0.0371;
    if (f == Family::A4) p.alpha1 = 0.0713;
    const auto subs = find_subspaces(p);
    for (const auto& s : subs) CHECK(s.closure_defect < 1e-10);
    const double lambda = 0.3141;
    try {
      operator_matrix(p, lambda, 3);
      FAIL("expected ClosureViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ClosureViolation);
    }
    double defect = 0.0;
    Tolerances loose;
    loose.vanish = 1e6;
    operator_matrix(p, lambda, 3, &defect, loose);
    CHECK(defect > 1e-6);
  }
}

TEST_CASE("subspace search enumerates both exponents for A3") {
  // Both (D -/+ beta + 3)/2 can close when beta makes either n integral.
  Rng rng(68);
  ModelParams p = rng.params(Family::A3);
  const double D = p.sum_h() - p.sum_l();
  p.beta = -(D + 2 + 2 * 3);
  const auto subs = find_subspaces(p);
  const InvariantSubspace* sub = find_n(subs, 3);
  REQUIRE(sub != nullptr);
  CHECK(std::abs(sub->lambda - (D + p.beta + 3) / 2) < 1e-12);
}
