#pragma once

// Small property-test kit: seeded generators plus a for_all driver that
// reports the failing case index and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "annealed/interpolation.hpp"
#include "annealed/rng.hpp"
#include "doctest.h"

namespace gen {

using annealed::Potential;
using annealed::Schedule;
using annealed::Vector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed, 99) {}

  double uniform(double a, double b) { return a + (b - a) * rng_.uniform(); }
  double log_uniform(double a, double b) { return a * std::pow(b / a, rng_.uniform()); }
  int integer(int lo, int hi) { return std::min(hi, lo + static_cast<int>(rng_.uniform() * (hi - lo + 1))); }
  bool coin() { return rng_.uniform() < 0.5; }

  Vector vector(int d, double scale) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = scale * rng_.normal();
    return v;
  }

  Potential gaussian(int d) { return Potential::gaussian(log_uniform(0.2, 5.0), d); }
  Potential student(int d) { return Potential::student(uniform(2.5, 8.0), log_uniform(0.5, 2.0), d); }
  Potential subbotin(int d) { return Potential::subbotin(uniform(0.8, 2.0), d); }
  Potential mixture(int d) {
    const int k = integer(1, 3);
    std::vector<double> w;
    std::vector<Vector> m;
    for (int i = 0; i < k; ++i) {
      w.push_back(uniform(0.2, 1.0));
      m.push_back(vector(d, 1.5));
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return Potential::gaussian_mixture(w, m, log_uniform(0.3, 2.0));
  }
  // Any family with a closed-form potential.
  Potential smooth(int d) {
    switch (integer(0, 3)) {
      case 0: return gaussian(d);
      case 1: return student(d);
      case 2: return subbotin(d);
      default: return mixture(d);
    }
  }
  Schedule schedule() {
    const double T = log_uniform(0.5, 4.0);
    switch (integer(0, 2)) {
      case 0: return Schedule::quadratic_piecewise(T);
      case 1: return Schedule::cosine(T, uniform(0.6, 2.0));
      default: return Schedule::affine_clamped(T, uniform(0.02, 0.3), uniform(0.7, 0.98));
    }
  }
  annealed::Rng& rng() { return rng_; }

 private:
  annealed::Rng rng_;
};

// Runs prop(gen, case_index) for n cases; each case gets its own generator.
template <class Prop>
void for_all(int n, std::uint64_t seed, Prop prop) {
  for (int i = 0; i < n; ++i) {
    Gen g(annealed::splitmix64(seed + static_cast<std::uint64_t>(i)));
    CAPTURE(i);
    CAPTURE(seed);
    prop(g, i);
  }
}

}  // namespace gen
