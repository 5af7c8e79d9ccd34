#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qheun/params.hpp"
#include "qheun/tolerance.hpp"

namespace qheun {

// Span of x^(lambda + k), k = 0..n, preserved by the operator of `family`.
struct InvariantSubspace {
  Family family = Family::A4;
  Scalar lambda = 0.0;
  int n = 0;
  std::optional<Scalar> alpha;  // exponent at infinity that closes the top (A4)
  // Column k holds the coefficients of A x^(lambda + k) on the basis.
  Eigen::MatrixXd matrix;
  // Largest coefficient that leaves the span, relative to its column.
  Scalar closure_defect = 0.0;

  int dimension() const { return n + 1; }
};

// All subspaces whose integrality condition holds:
// A4 n = -lambda - alpha for lambda in {lambda1, lambda2}, alpha in {alpha1, alpha2};
// A3 n = 1/2 - lambda for lambda in {lambda1, lambda2}; A2 n = 1/2 - lambda.
std::vector<InvariantSubspace> find_subspaces(const ModelParams& params, const Tolerances& tol = {});

// Banded matrix of A on x^(lambda + k), k = 0..n. Throws ClosureViolation
// when a coefficient outside the span exceeds the tolerance.
Eigen::MatrixXd operator_matrix(const ModelParams& params, Scalar lambda, int n, Scalar* closure_defect = nullptr,
                                const Tolerances& tol = {});

struct EigenPair {
  std::complex<Scalar> eigenvalue;
  std::vector<std::complex<Scalar>> coefficients;  // first nonzero entry is 1
  Scalar residual = 0.0;
};

// Eigenpairs of a small dense nonsymmetric matrix; residual is the relative
// matrix residual |M v - E v| / (|M| |v|).
std::vector<EigenPair> eigenpairs(const Eigen::MatrixXd& matrix);

// Eigenpairs of the subspace with residuals measured on the full
// q-difference equation (A - E) g for g = sum c_k x^(lambda + k).
// Throws ConvergenceFailure when a residual exceeds 1e-8.
std::vector<EigenPair> eigenpairs(const ModelParams& params, const InvariantSubspace& sub);

// Relative residual of (A - E) applied to the eigenfunction of pair.
Scalar eigenfunction_residual(const ModelParams& params, Scalar lambda, const EigenPair& pair);

// Closed-form eigenvalues of the one-dimensional subspaces.
Scalar one_dimensional_eigenvalue_A4(const ModelParams& params, Scalar alpha);
Scalar one_dimensional_eigenvalue_variant(const ModelParams& params);

}  // namespace qheun
