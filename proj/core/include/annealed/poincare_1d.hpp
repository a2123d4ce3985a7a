#pragma once

#include <functional>
#include <vector>

namespace annealed {

using LogDensity1D = std::function<double(double)>;

// Unnormalized density e^{logp} discretized on n equispaced nodes of [a, b].
class GridMeasure1D {
 public:
  GridMeasure1D(LogDensity1D log_density, double a, double b, int n);

  // Interval = mean +- 10 sd of the measure, widened until the density at the
  // endpoints has dropped below e^{-150} of its maximum (or the bracket is hit).
  static GridMeasure1D with_auto_interval(LogDensity1D log_density, int n, double bracket_lo = -500.0,
                                          double bracket_hi = 500.0);

  double lo() const { return a_; }
  double hi() const { return b_; }
  int size() const { return n_; }
  const LogDensity1D& log_density() const { return logp_; }
  GridMeasure1D refined() const { return GridMeasure1D(logp_, a_, b_, 2 * n_); }

  std::vector<double> nodes() const;
  // Normalized trapezoid weights; sum to 1.
  std::vector<double> weights() const;
  // max(weight at endpoints) / max weight.
  double boundary_weight() const;

 private:
  LogDensity1D logp_;
  double a_, b_;
  int n_;
};

struct SpectralGap {
  double c_p = 0.0;  // inverse of the smallest nonzero eigenvalue
  std::vector<double> nodes;
  std::vector<double> eigenfunction;  // normalized in L2(measure)
};

struct PoincareResult {
  double c_p = 0.0;         // value on the refined (2n) grid
  double c_p_coarse = 0.0;  // value on the n grid
  double refinement = 0.0;  // |coarse - fine| / fine
  bool refined_ok = false;  // refinement < 1e-2
  bool truncated = false;   // boundary weight above 1e-10
  double boundary_weight = 0.0;
  SpectralGap fine;
};

// Inverse spectral gap of the Neumann generator of the grid measure.
SpectralGap spectral_gap(const GridMeasure1D& m);
PoincareResult poincare_1d(const GridMeasure1D& m);

}  // namespace annealed
