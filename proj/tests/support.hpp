#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "qheun/params.hpp"

namespace qheun::testing {

class Rng {
 public:
  explicit Rng(unsigned long long seed) : gen_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
  double sign() { return integer(0, 1) ? 1.0 : -1.0; }

  // q away from 1 on either side.
  double q() { return integer(0, 1) ? uniform(0.3, 0.8) : uniform(1.25, 2.5); }

  std::vector<double> vec(std::size_t n, double a, double b) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(a, b);
    return v;
  }

  // Distinct nonzero singularities.
  std::vector<double> singularities(std::size_t n) {
    std::vector<double> t;
    while (t.size() < n) {
      const double x = sign() * uniform(0.5, 3.0);
      bool ok = true;
      for (double y : t) ok = ok && std::abs(x - y) > 0.2;
      if (ok) t.push_back(x);
    }
    return t;
  }

  ModelParams params(Family family) {
    ModelParams p;
    p.family = family;
    p.q = q();
    const std::size_t n = family_size(family);
    p.h = vec(n, -1.0, 1.0);
    p.l = vec(n, -1.0, 1.0);
    p.t = singularities(n);
    if (family == Family::A4) {
      p.alpha1 = uniform(-1.0, 1.0);
      p.alpha2 = p.alpha1 + sign() * uniform(0.1, 0.9);
    }
    if (family != Family::A2) p.beta = sign() * uniform(0.1, 0.9);
    p.E = uniform(-3.0, 3.0);
    return p;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline const Family kFamilies[] = {Family::A4, Family::A3, Family::A2};

}  // namespace qheun::testing
