#pragma once

#include <functional>
#include <vector>

namespace annealed {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_panels = 40000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

using ScalarFn = std::function<double(double)>;

// Globally adaptive Simpson rule: the panel with the largest local error is
// bisected until the summed error estimate meets the tolerance.
QuadratureResult integrate(const ScalarFn& f, double a, double b, const QuadratureConfig& cfg = {});

// Same, with interior breakpoints (kinks) that are never straddled by a panel.
QuadratureResult integrate_piecewise(const ScalarFn& f, std::vector<double> points,
                                     const QuadratureConfig& cfg = {});

// Integral over [a, inf) via x = a + u/(1-u). f must decay to zero.
QuadratureResult integrate_to_infinity(const ScalarFn& f, double a, const QuadratureConfig& cfg = {});

// Integral over the real line, split at 0.
QuadratureResult integrate_real_line(const ScalarFn& f, const QuadratureConfig& cfg = {});

}  // namespace annealed
