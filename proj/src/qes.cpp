#include "qheun/qes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qheun/error.hpp"
#include "qheun/operator.hpp"

namespace qheun {

namespace {

// Subspaces larger than this are not enumerated.
constexpr int kMaxDimension = 64;
constexpr Scalar kEigenResidual = 1e-8;

std::optional<int> nonnegative_integer(Scalar value, Scalar tol) {
  const Scalar r = std::round(value);
  if (std::abs(value - r) >= tol || r < 0.0 || r >= kMaxDimension) return std::nullopt;
  return static_cast<int>(r);
}

}  // namespace

Eigen::MatrixXd operator_matrix(const ModelParams& params, Scalar lambda, int n, Scalar* closure_defect,
                                const Tolerances& tol) {
  if (n < 0) throw Error(ErrorKind::InvalidParams, "subspace top index must be nonnegative");
  const int dim = n + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  Scalar defect = 0.0;
  for (int k = 0; k < dim; ++k) {
    const auto ds = d_coefficients(params, lambda + k);
    Scalar column_scale = 0.0;
    for (const auto& d : ds) column_scale = std::max(column_scale, std::abs(d.value));
    for (const auto& d : ds) {
      const int row = k + d.shift;
      if (row >= 0 && row < dim) {
        m(row, k) = d.value;
      } else if (column_scale > 0.0) {
        defect = std::max(defect, std::abs(d.value) / column_scale);
      }
    }
  }
  if (closure_defect) *closure_defect = defect;
  if (defect > tol.vanish) {
    throw Error(ErrorKind::ClosureViolation,
                "span of x^(lambda+k), k <= " + std::to_string(n) + " is not invariant (defect " +
                    std::to_string(defect) + ")");
  }
  return m;
}

std::vector<InvariantSubspace> find_subspaces(const ModelParams& p, const Tolerances& tol) {
  p.validate();
  struct Candidate {
    Scalar lambda;
    int n;
    std::optional<Scalar> alpha;
  };
  std::vector<Candidate> candidates;
  auto add = [&](Scalar lambda, Scalar top, std::optional<Scalar> alpha) {
    const auto n = nonnegative_integer(top - lambda, tol.integrality);
    if (!n) return;
    for (const auto& c : candidates) {
      if (c.n == *n && std::abs(c.lambda - lambda) < tol.integrality) return;
    }
    candidates.push_back({lambda, *n, alpha});
  };

  const Scalar D = p.sum_h() - p.sum_l();
  switch (p.family) {
    case Family::A4: {
      const Scalar base = (D - p.alpha1 - p.alpha2 + 2) / 2;
      for (Scalar lambda : {base - p.beta / 2, base + p.beta / 2}) {
        for (Scalar alpha : {p.alpha1, p.alpha2}) add(lambda, -alpha, alpha);
      }
      break;
    }
    case Family::A3:
      for (Scalar lambda : {(D - p.beta + 3) / 2, (D + p.beta + 3) / 2}) add(lambda, 0.5, std::nullopt);
      break;
    case Family::A2:
      add((D + 3) / 2, 0.5, std::nullopt);
      break;
  }

  std::vector<InvariantSubspace> out;
  for (const auto& c : candidates) {
    InvariantSubspace sub;
    sub.family = p.family;
    sub.lambda = c.lambda;
    sub.n = c.n;
    sub.alpha = c.alpha;
    sub.matrix = operator_matrix(p, c.lambda, c.n, &sub.closure_defect, tol);
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<EigenPair> eigenpairs(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw Error(ErrorKind::InvalidParams, "eigenpairs needs a nonempty square matrix");
  }
  if (matrix.rows() > kMaxDimension) throw Error(ErrorKind::InvalidParams, "matrix dimension exceeds 64");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, true);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "eigenvalue iteration did not converge");

  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Scalar norm = matrix.norm();
  std::vector<EigenPair> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    Eigen::VectorXcd v = vectors.col(i);
    const Scalar vmax = v.cwiseAbs().maxCoeff();
    Eigen::Index lead = 0;
    while (lead < v.size() && std::abs(v(lead)) <= 1e-12 * vmax) ++lead;
    v /= v(lead);
    const Eigen::VectorXcd r = matrix.cast<std::complex<Scalar>>() * v - values(i) * v;
    EigenPair pair;
    pair.eigenvalue = values(i);
    pair.coefficients.assign(v.data(), v.data() + v.size());
    const Scalar denom = (norm + std::abs(values(i))) * v.norm();
    pair.residual = denom > 0.0 ? r.norm() / denom : r.norm();
    out.push_back(std::move(pair));
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.eigenvalue.real() != b.eigenvalue.real()) return a.eigenvalue.real() < b.eigenvalue.real();
    return a.eigenvalue.imag() < b.eigenvalue.imag();
  });
  return out;
}

Scalar eigenfunction_residual(const ModelParams& params, Scalar lambda, const EigenPair& pair) {
  ModelParams p0 = params;
  p0.E = 0.0;
  const QDiffEquation eq = build_equation(p0);
  LaurentPoly gr, gi, gabs;
  for (std::size_t k = 0; k < pair.coefficients.size(); ++k) {
    const int deg = static_cast<int>(k);
    gr += LaurentPoly::monomial(deg, pair.coefficients[k].real());
    gi += LaurentPoly::monomial(deg, pair.coefficients[k].imag());
    gabs += LaurentPoly::monomial(deg, std::abs(pair.coefficients[k]));
  }
  const int p = eq.normalization;
  const Scalar er = pair.eigenvalue.real();
  const Scalar ei = pair.eigenvalue.imag();
  const LaurentPoly re = apply_equation_offset(eq, lambda, gr) - er * gr.shifted(p) + ei * gi.shifted(p);
  const LaurentPoly im = apply_equation_offset(eq, lambda, gi) - er * gi.shifted(p) - ei * gr.shifted(p);
  const LaurentPoly scale =
      apply_equation_magnitude(eq, lambda, gabs) + std::abs(pair.eigenvalue) * gabs.shifted(p);
  Scalar worst = 0.0;
  for (const auto& [k, c] : re.terms()) worst = std::max(worst, std::hypot(c, im[k]));
  for (const auto& [k, c] : im.terms()) worst = std::max(worst, std::hypot(re[k], c));
  const Scalar s = scale.max_abs();
  return s > 0.0 ? worst / s : worst;
}

std::vector<EigenPair> eigenpairs(const ModelParams& params, const InvariantSubspace& sub) {
  std::vector<EigenPair> pairs = eigenpairs(sub.matrix);
  for (auto& pair : pairs) {
    pair.residual = eigenfunction_residual(params, sub.lambda, pair);
    if (!(pair.residual < kEigenResidual)) {
      throw Error(ErrorKind::ConvergenceFailure,
                  "eigenfunction residual " + std::to_string(pair.residual) + " exceeds 1e-8");
    }
  }
  return pairs;
}

Scalar one_dimensional_eigenvalue_A4(const ModelParams& p, Scalar alpha) {
  const Scalar q = p.q;
  return -(qpow(q, p.h[0] + 0.5) * p.t[0] + qpow(q, p.h[1] + 0.5) * p.t[1]) * qpow(q, alpha) -
         (qpow(q, p.l[0] - 0.5) * p.t[0] + qpow(q, p.l[1] - 0.5) * p.t[1]) * qpow(q, p.alpha1 + p.alpha2 - alpha);
}

Scalar one_dimensional_eigenvalue_variant(const ModelParams& p) {
  Scalar s = 0.0;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    for (std::size_t j = i + 1; j < p.t.size(); ++j) {
      s += (qpow(p.q, p.h[i] + p.h[j] + 0.5) + qpow(p.q, p.l[i] + p.l[j] - 0.5)) * p.t[i] * p.t[j];
    }
  }
  return s;
}

}  // namespace qheun
