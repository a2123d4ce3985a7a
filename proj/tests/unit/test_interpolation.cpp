#include <cmath>

#include "annealed/errors.hpp"
#include "annealed/finite_difference.hpp"
#include "annealed/interpolation.hpp"
#include "annealed/quadrature.hpp"
#include "generators.hpp"

using namespace annealed;

namespace {

InterpolationLaw mixture_law(gen::Gen& g, int d) {
  return InterpolationLaw(g.coin() ? g.mixture(d) : g.gaussian(d), g.gaussian(d), g.schedule());
}

InterpolationLaw compact_law(gen::Gen& g, int d) {
  const double R = g.uniform(0.0, 1.5);
  Potential c = g.coin() ? Potential::compact_gaussian_convolution(R, g.log_uniform(0.1, 2.0), d)
                         : Potential::uniform_ball(R + 0.2, d);
  return InterpolationLaw(std::move(c), g.gaussian(d), Schedule::quadratic_piecewise(1.0));
}

// Oracle: log p_lambda(x) = log E exp(-W((x - sqrt(lambda) X)/sqrt(1-lambda))) / (1-lambda)^{d/2}
// by 1D quadrature over the target density.
double convolution_log_density_1d(const InterpolationLaw& law, double lambda, double x) {
  const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
  auto f = [&](double u) {
    const double pu = std::exp(-law.target().value(Vector::Constant(1, u)));
    return pu * std::exp(-law.base().value(Vector::Constant(1, (x - sl * u) / s1l))) / s1l;
  };
  QuadratureConfig q;
  q.abs_tol = 1e-14;
  return std::log(integrate_real_line(f, q).value);
}

}  // namespace

TEST_CASE("mixture closed form: score is the gradient of the log-density") {
  gen::for_all(30, 31, [](gen::Gen& g, int) {
    const int d = g.integer(1, 3);
    const InterpolationLaw law = mixture_law(g, d);
    const double lambda = g.uniform(0.05, 0.95);
    const Vector x = g.vector(d, 2.0);
    Vector s(d);
    REQUIRE(law.closed_form_score(lambda, x, s));
    const auto fd = fd_gradient([&](const Vector& y) { return *law.closed_form_log_density(lambda, y); }, x, 1e-3);
    CHECK((s - fd.value).norm() < 1e-6 * (1.0 + s.norm()));
    const auto fh = fd_jacobian(
        [&](const Vector& y) {
          Vector o(d);
          law.closed_form_score(lambda, y, o);
          return o;
        },
        x, 1e-3);
    CHECK((*law.closed_form_hessian(lambda, x) - fh.value).cwiseAbs().maxCoeff() < 1e-6);
  });
}

TEST_CASE("mixture closed form matches the convolution integral") {
  gen::for_all(15, 32, [](gen::Gen& g, int) {
    const InterpolationLaw law = mixture_law(g, 1);
    const double lambda = g.uniform(0.05, 0.95);
    const double x = g.uniform(-3.0, 3.0);
    CHECK(*law.closed_form_log_density(lambda, Vector::Constant(1, x)) ==
          doctest::Approx(convolution_log_density_1d(law, lambda, x)).epsilon(1e-8));
  });
}

TEST_CASE("compact closed form: score is the gradient of the log-density") {
  gen::for_all(30, 33, [](gen::Gen& g, int) {
    const int d = g.integer(1, 3);
    const InterpolationLaw law = compact_law(g, d);
    const double lambda = g.uniform(0.05, 0.95);
    const Vector x = g.vector(d, 1.5);
    Vector s(d);
    REQUIRE(law.closed_form_score(lambda, x, s));
    const auto fd = fd_gradient([&](const Vector& y) { return *law.closed_form_log_density(lambda, y); }, x, 1e-3);
    CHECK((s - fd.value).norm() < 1e-5 * (1.0 + s.norm()));
  });
}

TEST_CASE("compact closed form integrates to one in 1D") {
  gen::for_all(10, 34, [](gen::Gen& g, int) {
    const InterpolationLaw law = compact_law(g, 1);
    const double lambda = g.uniform(0.05, 0.95);
    QuadratureConfig q;
    q.abs_tol = 1e-11;
    const double mass = integrate_real_line(
        [&](double x) { return std::exp(*law.closed_form_log_density(lambda, Vector::Constant(1, x))); }, q).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
  });
}

TEST_CASE("compact closed form survives the far field") {
  const InterpolationLaw law(Potential::uniform_ball(1.0, 3), Potential::gaussian(1.0, 3),
                             Schedule::quadratic_piecewise(1.0));
  Vector s(3);
  const Vector x = Vector::Constant(3, 60.0);
  REQUIRE(law.closed_form_score(0.5, x, s));
  CHECK(s.allFinite());
  CHECK(std::isfinite(*law.closed_form_log_density(0.5, x)));
  // the far-field branch continues the exact one
  const auto fd = fd_gradient([&](const Vector& y) { return *law.closed_form_log_density(0.5, y); }, x, 1e-3);
  CHECK((s - fd.value).norm() < 1e-6 * s.norm());
  const Vector near = Vector::Constant(3, 12.0);
  const Vector nearer = near * (1.0 - 1e-9);
  CHECK(*law.closed_form_log_density(0.5, near) == doctest::Approx(*law.closed_form_log_density(0.5, nearer)).epsilon(1e-6));
}

TEST_CASE("SNIS score agrees with the closed form within its error") {
  gen::for_all(12, 35, [](gen::Gen& g, int i) {
    const int d = g.integer(1, 2);
    const InterpolationLaw law = mixture_law(g, d);
    const double lambda = g.uniform(0.2, 0.8);
    const Vector x = g.vector(d, 1.0);
    Vector exact(d);
    law.closed_form_score(lambda, x, exact);
    SnisConfig cfg;
    cfg.particles = 20000;
    cfg.ess_fraction = 0.005;
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.swapped = g.coin();
    cfg.form = g.coin() ? HessianForm::w_form : HessianForm::u_form;
    const ScoreEstimate e = snis_score(law, lambda, x, cfg);
    for (int k = 0; k < d; ++k) CHECK(std::abs(e.value(k) - exact(k)) < 6.0 * e.std_error(k) + 1e-3);
  });
}

TEST_CASE("SNIS Hessian forms agree with each other and the closed form") {
  const InterpolationLaw law(Potential::gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)}, 0.5),
                             Potential::gaussian(1.0, 1), Schedule::quadratic_piecewise(1.0));
  const Vector x = Vector::Constant(1, 0.3);
  const Matrix exact = *law.closed_form_hessian(0.5, x);
  for (HessianForm f : {HessianForm::w_form, HessianForm::u_form, HessianForm::mixed}) {
    SnisConfig cfg;
    cfg.particles = 40000;
    cfg.form = f;
    cfg.cross_check = true;
    const HessianEstimate h = snis_hessian(law, 0.5, x, cfg);
    CAPTURE(to_string(f));
    CHECK(std::abs(h.value(0, 0) - exact(0, 0)) < 6.0 * h.std_error(0, 0) + 1e-3);
    REQUIRE(h.discrepancy);
  }
}

TEST_CASE("SNIS with a heavy-tailed target stays consistent across proposals") {
  const InterpolationLaw law(Potential::student(3.0, 1.0, 1), Potential::gaussian(1.0, 1),
                             Schedule::quadratic_piecewise(1.0));
  const Vector x = Vector::Constant(1, 1.2);
  SnisConfig a, b;
  a.particles = b.particles = 40000;
  b.swapped = true;
  b.seed = 3;
  const ScoreEstimate ea = snis_score(law, 0.6, x, a), eb = snis_score(law, 0.6, x, b);
  CHECK(std::abs(ea.value(0) - eb.value(0)) < 6.0 * std::hypot(ea.std_error(0), eb.std_error(0)) + 1e-3);
}

TEST_CASE("endpoints delegate to the potentials") {
  const InterpolationLaw law(Potential::student(3.0, 1.0, 2), Potential::subbotin(1.5, 2),
                             Schedule::quadratic_piecewise(1.0));
  const Vector x = Vector::Constant(2, 0.7);
  CHECK((score_at_lambda(law, 1.0, x).value + law.target().gradient(x)).norm() < 1e-14);
  CHECK((score_at_lambda(law, 0.0, x).value + law.base().gradient(x)).norm() < 1e-14);
  CHECK(log_density_at_lambda(law, 1.0, x) == doctest::Approx(-law.target().value(x)));
  CHECK_THROWS_AS(log_density_at_lambda(law, 0.5, x), UnsupportedOperation);
}

TEST_CASE("interpolant samples have the interpolated covariance") {
  const InterpolationLaw law(Potential::gaussian(4.0, 2), Potential::gaussian(1.0, 2), Schedule::quadratic_piecewise(1.0));
  const PointBatch x = sample_interpolant(law, 0.5, 50000, 1);
  const double lambda = law.lambda_at(0.5);
  const double var = x.col(0).squaredNorm() / x.rows();
  CHECK(var == doctest::Approx(lambda * 4.0 + (1.0 - lambda)).epsilon(0.03));
  CHECK(sample_interpolant(law, 0.5, 10, 7) == sample_interpolant(law, 0.5, 10, 7));
}

TEST_CASE("degenerate weights are reported") {
  const InterpolationLaw law(Potential::gaussian(0.01, 1), Potential::gaussian(0.01, 1), Schedule::quadratic_piecewise(1.0));
  SnisConfig cfg;
  cfg.particles = 2000;
  cfg.swapped = true;
  CHECK_THROWS_AS(snis_score(law, 0.99, Vector::Constant(1, 5.0), cfg), DegenerateWeights);
}
