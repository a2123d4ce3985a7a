#include "annealed/oracle.hpp"

#include <cmath>

#include "annealed/errors.hpp"

namespace annealed {

LogDensity1D conditional_log_density_1d(const InterpolationLaw& law, double lambda, double x) {
  if (law.dim() != 1) throw DomainError("conditional_log_density_1d: law must be one-dimensional");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("conditional_log_density_1d: lambda must lie in (0, 1)");
  const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
  const Potential& u = law.target();
  const Potential& w = law.base();
  return [&u, &w, sl, s1l, x](double y) {
    Vector a(1), b(1);
    a(0) = y / sl;
    b(0) = (x - y) / s1l;
    return -u.value(a) - w.value(b);
  };
}

PoincareResult conditional_poincare_oracle(const InterpolationLaw& law, double lambda, double x, int nodes) {
  return poincare_1d(GridMeasure1D::with_auto_interval(conditional_log_density_1d(law, lambda, x), nodes));
}

}  // namespace annealed
