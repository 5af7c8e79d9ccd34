#pragma once

#include <map>
#include <string>
#include <vector>

#include "qheun/laurent.hpp"
#include "qheun/params.hpp"
#include "qheun/tolerance.hpp"

namespace qheun {

// Monic a(x), c(x) with zeros q^(h_i+1/2) t_i and q^(l_i-1/2) t_i; b(x) is
// left open apart from its E slot.
struct VariantSkeleton {
  Family family = Family::A3;  // A3 or A2
  Scalar q = 0.5;
  std::vector<Scalar> h;
  std::vector<Scalar> l;
  std::vector<Scalar> t;
  Scalar beta = 0.0;  // A3 only
  Scalar E = 0.0;

  void validate() const;
  ModelParams params() const;
};

struct DerivedA3 {
  Scalar b3 = 0.0;
  Scalar b2 = 0.0;
  Scalar b0 = 0.0;
  Scalar lambda = 0.0;  // smaller-or-first exponent at 0; the other is lambda + beta
};

struct DerivedA2 {
  Scalar b4 = 0.0;
  Scalar b3 = 0.0;
  Scalar b1 = 0.0;
  Scalar b0 = 0.0;
  Scalar lambda = 0.0;  // exponents at 0 are lambda, lambda + 1
};

// Forces b0 and lambda from exponents lambda, lambda + beta at 0, b3 from
// exponents differing by 1 at infinity, then b2 from apparency there.
DerivedA3 derive_b_A3(const VariantSkeleton& sk);

// Same elimination with difference 1 and apparency at both 0 and infinity.
DerivedA2 derive_b_A2(const VariantSkeleton& sk);

// a(x) g(x/q) + b(x) g(x) + c(x) g(qx) with b given by degree; the E slot
// (x^1 for A3, x^2 for A2) is set to -E.
QDiffEquation skeleton_equation(const VariantSkeleton& sk, const std::map<int, Scalar>& b);

// Full equation using the derived coefficients.
QDiffEquation derived_equation(const VariantSkeleton& sk);

struct ConditionResult {
  std::string name;
  bool pass = false;
  Scalar expected = 0.0;
  Scalar observed = 0.0;
  Scalar residual = 0.0;
  std::string note;
};

struct CharacterizationReport {
  Family family = Family::A3;
  std::vector<ConditionResult> conditions;

  bool all_pass() const;
};

// Local conditions characterizing the variants, evaluated on eq:
// A3 - exponent difference |beta| at 0, difference 1 at infinity, infinity
// apparent; A2 - difference 1 at 0 and at infinity, both apparent.
CharacterizationReport check_conditions(Family family, const QDiffEquation& eq, Scalar beta,
                                        const Tolerances& tol = {});

CharacterizationReport verify_characterization(const VariantSkeleton& sk, const Tolerances& tol = {});

}  // namespace qheun
