#pragma once

#include "annealed/finite_difference.hpp"
#include "annealed/interpolation.hpp"
#include "annealed/poincare_1d.hpp"
#include "annealed/quadrature.hpp"

namespace annealed {

// log q^x(y) up to a constant for d = 1 and lambda in (0, 1):
// -U(y / sqrt(lambda)) - W((x - y) / sqrt(1 - lambda)).
LogDensity1D conditional_log_density_1d(const InterpolationLaw& law, double lambda, double x);

// The returned function refers to law, which must outlive it.

// Spectral-gap C_P of q^x on an automatically sized interval.
PoincareResult conditional_poincare_oracle(const InterpolationLaw& law, double lambda, double x, int nodes = 800);

}  // namespace annealed
