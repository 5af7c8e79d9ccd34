#include "qheun/params.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "qheun/error.hpp"

namespace qheun {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::A4: return "A4";
    case Family::A3: return "A3";
    case Family::A2: return "A2";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  if (name == "A4" || name == "a4") return Family::A4;
  if (name == "A3" || name == "a3") return Family::A3;
  if (name == "A2" || name == "a2") return Family::A2;
  throw Error(ErrorKind::InvalidParams, "unknown family '" + std::string(name) + "' (expected A4, A3 or A2)");
}

std::size_t family_size(Family family) {
  switch (family) {
    case Family::A4: return 2;
    case Family::A3: return 3;
    case Family::A2: return 4;
  }
  return 0;
}

int normalization_power(Family family) { return family == Family::A2 ? 2 : 1; }

void ModelParams::validate() const {
  if (!std::isfinite(q) || !(q > 0.0)) throw Error(ErrorKind::InvalidParams, "invariant violated: q > 0");
  if (q == 1.0) throw Error(ErrorKind::InvalidParams, "invariant violated: q != 1");
  const std::size_t n = family_size(family);
  if (h.size() != n || l.size() != n || t.size() != n) {
    throw Error(ErrorKind::InvalidParams, "invariant violated: h, l, t must have length " + std::to_string(n) +
                                              " for family " + std::string(to_string(family)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i] == 0.0) throw Error(ErrorKind::InvalidParams, "invariant violated: t" + std::to_string(i + 1) + " != 0");
    if (!std::isfinite(h[i]) || !std::isfinite(l[i]) || !std::isfinite(t[i])) {
      throw Error(ErrorKind::InvalidParams, "invariant violated: h, l, t must be finite");
    }
  }
  for (Scalar s : {alpha1, alpha2, beta, E}) {
    if (!std::isfinite(s)) throw Error(ErrorKind::InvalidParams, "invariant violated: parameters must be finite");
  }
}

Scalar ModelParams::sum_h() const { return std::accumulate(h.begin(), h.end(), 0.0); }
Scalar ModelParams::sum_l() const { return std::accumulate(l.begin(), l.end(), 0.0); }
Scalar ModelParams::prod_t() const { return std::accumulate(t.begin(), t.end(), 1.0, std::multiplies<>()); }

}  // namespace qheun
