#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qheun/laurent.hpp"

namespace qheun {

// A4: q-Heun operator; A3, A2: its third and second degenerate variants.
enum class Family { A4, A3, A2 };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// Number of (h_i, l_i, t_i) triples carried by a family: 2, 3 or 4.
std::size_t family_size(Family family);

// Power of x that turns (A - E) g = 0 into polynomial form: 1, 1 or 2.
int normalization_power(Family family);

struct ModelParams {
  Family family = Family::A4;
  Scalar q = 0.5;
  std::vector<Scalar> h;
  std::vector<Scalar> l;
  std::vector<Scalar> t;
  Scalar alpha1 = 0.0;  // A4 only
  Scalar alpha2 = 0.0;  // A4 only
  Scalar beta = 0.0;    // A4, A3
  Scalar E = 0.0;

  // Throws Error(InvalidParams) naming the violated invariant.
  void validate() const;

  Scalar sum_h() const;
  Scalar sum_l() const;
  Scalar prod_t() const;
};

}  // namespace qheun
