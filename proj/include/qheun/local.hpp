#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qheun/laurent.hpp"
#include "qheun/tolerance.hpp"

namespace qheun {

enum class BasePoint { Zero, Infinity };

std::string_view to_string(BasePoint point);

struct ExponentPair {
  Scalar lambda1 = 0.0;  // lambda1 <= lambda2
  Scalar lambda2 = 0.0;
  Scalar difference = 0.0;
  // difference is within tolerance of a nonnegative integer
  bool resonant = false;

  // round(difference) when resonant with a positive integer difference.
  std::optional<int> resonance_index() const;
};

enum class SeriesStatus { Generic, ApparentResonance, LogarithmicNeeded };

std::string_view to_string(SeriesStatus status);

// g(x) = x^lambda sum c_n x^n at 0, or sum c_n x^(-lambda-n) at infinity.
struct LocalExpansion {
  BasePoint point = BasePoint::Zero;
  Scalar lambda = 0.0;
  std::vector<Scalar> coeffs;  // c_0 = 1
  int order = 0;               // index of the last coefficient kept
  SeriesStatus status = SeriesStatus::Generic;
  std::optional<int> resonance;  // index n where the leading factor vanished
  Scalar consistency = 0.0;      // relative consistency sum at the resonance

  // Exponent of the x^offset factor and the polynomial that multiplies it.
  Scalar offset() const;
  LaurentPoly polynomial() const;
};

struct SingularityReport {
  BasePoint point = BasePoint::Zero;
  bool is_regular = false;
  std::optional<ExponentPair> exponents;
  std::optional<bool> apparent;
};

// Degree condition M = M'' <= M' at 0, N = N'' >= N' at infinity.
bool classify(const QDiffEquation& eq, BasePoint point);

// Relative residual |q^-lambda u_M + v_M + q^lambda w_M| / (sum of magnitudes)
// at 0, and the mirrored expression at infinity.
Scalar characteristic_residual(const QDiffEquation& eq, BasePoint point, Scalar lambda);

ExponentPair exponents(const QDiffEquation& eq, BasePoint point, const Tolerances& tol = {});

LocalExpansion frobenius_series(const QDiffEquation& eq, BasePoint point, Scalar lambda, int order,
                                const Tolerances& tol = {});

struct ApparencyCheck {
  ExponentPair exponents;
  std::optional<int> index;  // resonance index, empty when not resonant
  Scalar consistency = 0.0;  // relative magnitude of the consistency sum
  std::optional<bool> apparent;
};

ApparencyCheck check_apparency(const QDiffEquation& eq, BasePoint point, const Tolerances& tol = {});

// Empty when the exponent difference is not a positive integer.
std::optional<bool> apparency(const QDiffEquation& eq, BasePoint point, const Tolerances& tol = {});

SingularityReport analyze(const QDiffEquation& eq, BasePoint point, const Tolerances& tol = {});

// Coefficients of the equation applied to a truncated expansion, ordered
// from the dominant end: order n is x^(lambda + M + n) at 0 and
// x^(-lambda + N - n) at infinity. scale holds the same sums taken in
// absolute value.
struct ResidualProfile {
  std::vector<Scalar> magnitude;
  std::vector<Scalar> scale;

  Scalar relative(std::size_t n) const;
  // Largest relative residual over orders 0..upto (inclusive).
  Scalar max_relative(std::size_t upto) const;
};

ResidualProfile residual_profile(const QDiffEquation& eq, const LocalExpansion& expansion);

}  // namespace qheun
