#include "qheun/operator.hpp"

#include <array>
#include <cmath>
#include <map>

#include "qheun/error.hpp"

namespace qheun {

namespace {

std::vector<Scalar> upper_roots(const ModelParams& p) {
  std::vector<Scalar> r;
  for (std::size_t i = 0; i < p.t.size(); ++i) r.push_back(qpow(p.q, p.h[i] + 0.5) * p.t[i]);
  return r;
}

std::vector<Scalar> lower_roots(const ModelParams& p) {
  std::vector<Scalar> r;
  for (std::size_t i = 0; i < p.t.size(); ++i) r.push_back(qpow(p.q, p.l[i] - 0.5) * p.t[i]);
  return r;
}

Scalar q_sym(Scalar q, Scalar s) { return qpow(q, s / 2) + qpow(q, -s / 2); }

// sum_i (q^h_i + q^l_i) t_i
Scalar linear_sum(const ModelParams& p) {
  Scalar s = 0.0;
  for (std::size_t i = 0; i < p.t.size(); ++i) s += (qpow(p.q, p.h[i]) + qpow(p.q, p.l[i])) * p.t[i];
  return s;
}

Scalar d4(const ModelParams& p, int shift, Scalar mu) {
  const Scalar q = p.q;
  const Scalar a = p.alpha1 + p.alpha2;
  switch (shift) {
    case 1:
      return qpow(q, a + mu) - (qpow(q, p.alpha1) + qpow(q, p.alpha2)) + qpow(q, -mu);
    case 0:
      return -(qpow(q, p.h[0] + 0.5) * p.t[0] + qpow(q, p.h[1] + 0.5) * p.t[1]) * qpow(q, -mu) -
             (qpow(q, p.l[0] - 0.5) * p.t[0] + qpow(q, p.l[1] - 0.5) * p.t[1]) * qpow(q, a + mu);
    case -1:
      return (qpow(q, p.h[0] + p.h[1] + 1 - mu) -
              qpow(q, (p.h[0] + p.h[1] + p.l[0] + p.l[1] + a) / 2) * q_sym(q, p.beta) +
              qpow(q, p.l[0] + p.l[1] + a - 1 + mu)) *
             p.t[0] * p.t[1];
    default:
      return 0.0;
  }
}

// Shifts +2, +1, 0 are shared by A3 and A2.
Scalar d_upper(const ModelParams& p, int shift, Scalar mu) {
  const Scalar q = p.q;
  const std::size_t n = p.t.size();
  switch (shift) {
    case 2:
      return qpow(q, -mu) + qpow(q, mu) - qpow(q, 0.5) - qpow(q, -0.5);
    case 1: {
      Scalar s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += (qpow(q, p.h[i]) + qpow(q, p.l[i]) - qpow(q, p.h[i] + 0.5 - mu) - qpow(q, p.l[i] - 0.5 + mu)) * p.t[i];
      }
      return s;
    }
    case 0: {
      Scalar s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          s += (qpow(q, p.h[i] + p.h[j] + 1 - mu) + qpow(q, p.l[i] + p.l[j] - 1 + mu)) * p.t[i] * p.t[j];
        }
      }
      return s;
    }
    default:
      return 0.0;
  }
}

Scalar d3(const ModelParams& p, int shift, Scalar mu) {
  if (shift >= 0) return d_upper(p, shift, mu);
  if (shift != -1) return 0.0;
  const Scalar q = p.q;
  const Scalar H = p.sum_h();
  const Scalar L = p.sum_l();
  return (-qpow(q, H + 1.5 - mu) - qpow(q, L - 1.5 + mu) + qpow(q, (L + H) / 2) * q_sym(q, p.beta)) * p.prod_t();
}

Scalar d2(const ModelParams& p, int shift, Scalar mu) {
  if (shift >= 0) return d_upper(p, shift, mu);
  const Scalar q = p.q;
  const Scalar H = p.sum_h();
  const Scalar L = p.sum_l();
  const Scalar T = p.prod_t();
  if (shift == -1) {
    Scalar s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      s += (qpow(q, (H + L) / 2) * (qpow(q, -p.h[i]) + qpow(q, -p.l[i])) - qpow(q, H + 1.5 - mu - p.h[i]) -
            qpow(q, L - 1.5 + mu - p.l[i])) /
           p.t[i];
    }
    return T * s;
  }
  if (shift == -2) {
    return (qpow(q, H + 2 - mu) + qpow(q, L - 2 + mu) - qpow(q, (L + H) / 2) * q_sym(q, 1.0)) * T;
  }
  return 0.0;
}

}  // namespace

QDiffEquation build_equation(const ModelParams& p) {
  p.validate();
  const Scalar q = p.q;
  const auto up = upper_roots(p);
  const auto lo = lower_roots(p);
  QDiffEquation eq;
  eq.q = q;
  eq.normalization = normalization_power(p.family);
  eq.u = from_roots(up);
  switch (p.family) {
    case Family::A4: {
      eq.w = from_roots(lo, qpow(q, p.alpha1 + p.alpha2));
      const Scalar b0 = -qpow(q, (p.sum_h() + p.sum_l() + p.alpha1 + p.alpha2) / 2) * q_sym(q, p.beta) * p.prod_t();
      eq.v = LaurentPoly({{2, -(qpow(q, p.alpha1) + qpow(q, p.alpha2))}, {1, -p.E}, {0, b0}});
      break;
    }
    case Family::A3: {
      eq.w = from_roots(lo);
      const Scalar b0 = qpow(q, (p.sum_h() + p.sum_l()) / 2) * q_sym(q, p.beta) * p.prod_t();
      eq.v = LaurentPoly({{3, -q_sym(q, 1.0)}, {2, linear_sum(p)}, {1, -p.E}, {0, b0}});
      break;
    }
    case Family::A2: {
      eq.w = from_roots(lo);
      const Scalar P = qpow(q, (p.sum_h() + p.sum_l()) / 2) * p.prod_t();
      Scalar inv = 0.0;
      for (std::size_t i = 0; i < 4; ++i) inv += (qpow(q, -p.h[i]) + qpow(q, -p.l[i])) / p.t[i];
      eq.v = LaurentPoly({{4, -q_sym(q, 1.0)}, {3, linear_sum(p)}, {2, -p.E}, {1, P * inv}, {0, -P * q_sym(q, 1.0)}});
      break;
    }
  }
  for (const LaurentPoly* poly : {&eq.u, &eq.v, &eq.w}) {
    for (const auto& [k, c] : poly->terms()) {
      if (!std::isfinite(c)) throw Error(ErrorKind::InvalidParams, "equation coefficient overflow");
    }
  }
  return eq;
}

Scalar d_coefficient(const ModelParams& p, int shift, Scalar mu) {
  switch (p.family) {
    case Family::A4: return d4(p, shift, mu);
    case Family::A3: return d3(p, shift, mu);
    case Family::A2: return d2(p, shift, mu);
  }
  return 0.0;
}

std::vector<DCoefficient> d_coefficients(const ModelParams& p, Scalar mu) {
  p.validate();
  int top = 1;
  int bottom = -1;
  if (p.family == Family::A3) top = 2;
  if (p.family == Family::A2) top = 2, bottom = -2;
  std::vector<DCoefficient> out;
  for (int s = top; s >= bottom; --s) out.push_back({s, d_coefficient(p, s, mu)});
  return out;
}

QDiffEquation gauge_transform(const QDiffEquation& eq, Scalar nu) {
  QDiffEquation out = eq;
  out.u *= qpow(eq.q, -nu);
  out.w *= qpow(eq.q, nu);
  return out;
}

}  // namespace qheun
