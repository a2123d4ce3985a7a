#include <cmath>

#include "annealed/oracle.hpp"
#include "generators.hpp"

using namespace annealed;

namespace {

double gaussian_conditional_variance(double tau2, double sigma2, double lambda) {
  return 1.0 / (1.0 / (lambda * tau2) + 1.0 / ((1.0 - lambda) * sigma2));
}

}  // namespace

TEST_CASE("spectral gap of a Gaussian grid measure is its variance") {
  gen::for_all(10, 41, [](gen::Gen& g, int) {
    const double v = g.log_uniform(0.05, 20.0), m = g.uniform(-3.0, 3.0);
    const auto grid = GridMeasure1D::with_auto_interval([=](double y) { return -(y - m) * (y - m) / (2.0 * v); }, 800);
    const PoincareResult r = poincare_1d(grid);
    CHECK(r.c_p == doctest::Approx(v).epsilon(1e-3));
    CHECK(r.refined_ok);
    CHECK_FALSE(r.truncated);
  });
}

TEST_CASE("grid weights are normalized and the interval covers the mass") {
  const auto grid = GridMeasure1D::with_auto_interval([](double y) { return -std::abs(y); }, 400);
  double total = 0.0;
  for (double w : grid.weights()) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(grid.boundary_weight() < 1e-10);
  CHECK(grid.refined().size() == 800);
}

TEST_CASE("conditional oracle matches the Gaussian conditional variance") {
  gen::for_all(20, 42, [](gen::Gen& g, int) {
    const double tau2 = g.log_uniform(0.2, 5.0), sigma2 = g.log_uniform(0.2, 5.0);
    const InterpolationLaw law(Potential::gaussian(tau2, 1), Potential::gaussian(sigma2, 1),
                               Schedule::quadratic_piecewise(1.0));
    const double lambda = g.uniform(0.02, 0.98), x = g.uniform(-4.0, 4.0);
    const PoincareResult r = conditional_poincare_oracle(law, lambda, x);
    CHECK(r.c_p == doctest::Approx(gaussian_conditional_variance(tau2, sigma2, lambda)).epsilon(2e-3));
  });
}

TEST_CASE("conditional log-density has the expected shape") {
  const InterpolationLaw law(Potential::gaussian(2.0, 1), Potential::gaussian(1.0, 1), Schedule::quadratic_piecewise(1.0));
  const auto logq = conditional_log_density_1d(law, 0.5, 1.0);
  // Gaussian with mean x * (lambda tau2)/(lambda tau2 + (1-lambda) sigma2) = 2/3
  const double v = gaussian_conditional_variance(2.0, 1.0, 0.5);
  const double a = logq(2.0 / 3.0 + 0.4) - logq(2.0 / 3.0);
  CHECK(a == doctest::Approx(-0.16 / (2.0 * v)).epsilon(1e-10));
  CHECK(logq(2.0 / 3.0 + 0.3) == doctest::Approx(logq(2.0 / 3.0 - 0.3)).epsilon(1e-12));
}

TEST_CASE("a multimodal conditional law has a larger gap constant than its modes") {
  const InterpolationLaw law(
      Potential::gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -3.0), Vector::Constant(1, 3.0)}, 0.25),
      Potential::gaussian(4.0, 1), Schedule::quadratic_piecewise(1.0));
  const PoincareResult r = conditional_poincare_oracle(law, 0.9, 0.0);
  CHECK(r.refined_ok);
  CHECK(r.c_p > 5.0 * 0.9 * 0.25);
}
