#include <cmath>
#include <sstream>

#include "annealed/diagnostics.hpp"
#include "annealed/errors.hpp"
#include "annealed/quadrature.hpp"
#include "generators.hpp"

using namespace annealed;

TEST_CASE("Gaussian KL and W2 closed forms") {
  const Vector z = Vector::Zero(1);
  const auto a = gaussian_divergences(z, Matrix::Constant(1, 1, 4.0), z, Matrix::Identity(1, 1));
  CHECK(a.kl == doctest::Approx((3.0 - std::log(4.0)) / 2.0));
  gen::for_all(10, 71, [](gen::Gen& g, int) {
    const int d = g.integer(1, 4);
    const double va = g.log_uniform(0.1, 5.0), vb = g.log_uniform(0.1, 5.0);
    const Vector z = Vector::Zero(d);
    const auto r = gaussian_divergences(z, va * Matrix::Identity(d, d), z, vb * Matrix::Identity(d, d));
    CHECK(r.w2_sq == doctest::Approx(d * std::pow(std::sqrt(va) - std::sqrt(vb), 2)).epsilon(1e-9));
    const Vector shift = g.vector(d, 1.0);
    const auto s = gaussian_divergences(shift, Matrix::Identity(d, d), z, Matrix::Identity(d, d));
    CHECK(s.kl == doctest::Approx(shift.squaredNorm() / 2.0));
    const Matrix A = Matrix::Random(d, d);
    const Matrix S = A * A.transpose() + Matrix::Identity(d, d);
    const auto self = gaussian_divergences(shift, S, shift, S);
    CHECK(self.kl == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(self.w2_sq) < 1e-10);
  });
  CHECK_THROWS_AS(gaussian_divergences(Vector::Zero(2), Matrix::Zero(2, 2), Vector::Zero(2), Matrix::Identity(2, 2)),
                  DomainError);
}

TEST_CASE("Gaussian L1 distance matches quadrature") {
  gen::for_all(10, 72, [](gen::Gen& g, int) {
    const double m1 = g.uniform(-2.0, 2.0), m2 = g.uniform(-2.0, 2.0);
    const double v1 = g.log_uniform(0.2, 4.0), v2 = g.log_uniform(0.2, 4.0);
    auto pdf = [](double x, double m, double v) { return std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * M_PI * v); };
    QuadratureConfig q;
    q.abs_tol = 1e-11;
    const double ref = integrate_real_line([&](double x) { return std::abs(pdf(x, m1, v1) - pdf(x, m2, v2)); }, q).value;
    CHECK(gaussian_l1_distance_1d(m1, v1, m2, v2) == doctest::Approx(ref).epsilon(1e-6));
  });
  CHECK(gaussian_l1_distance_1d(0.0, 1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("empirical report against a shifted reference") {
  const PointBatch x = sample_measure(Potential::gaussian(1.0, 1), 20000, 3);
  PointBatch shifted = x;
  shifted.array() += 1.0;
  const EmpiricalReport r = empirical_report(shifted, Potential::gaussian(1.0, 1));
  REQUIRE(r.w2_exact_1d);
  CHECK(*r.w2_exact_1d == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(r.kl_gaussianized);
  CHECK(*r.kl_gaussianized == doctest::Approx(0.5).epsilon(0.1));
  REQUIRE(r.tv_fits_1d);
  REQUIRE(r.pinsker);
  // |p - q|_1 <= sqrt(2 KL)
  CHECK(*r.tv_fits_1d <= *r.pinsker + 1e-12);
  CHECK(r.to_json().contains("mean"));
}

TEST_CASE("empirical report edge cases") {
  CHECK_THROWS_AS(empirical_report(PointBatch::Zero(50, 1), Potential::gaussian(1.0, 1)), DomainError);
  const EmpiricalReport r = empirical_report(PointBatch::Zero(200, 2), Potential::gaussian(1.0, 2));
  CHECK_FALSE(r.flags.empty());
  const PointBatch a = sample_measure(Potential::gaussian(1.0, 2), 500, 1);
  const EmpiricalReport same = empirical_report(a, a);
  CHECK(*same.kl_gaussianized == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("bias study validates its inputs") {
  StudyConfig cfg{InterpolationLaw(Potential::gaussian(4.0, 1), Potential::gaussian(1.0, 1),
                                   Schedule::quadratic_piecewise(1.0))};
  cfg.kappas = {0.1, 0.05};
  cfg.chains = 200;
  CHECK_THROWS_AS(bias_scaling_study(cfg), DomainError);
  cfg.kappas = {0.1, 0.05, 0.7};
  CHECK_THROWS_AS(bias_scaling_study(cfg), DomainError);
}

TEST_CASE("small bias study produces rows and a CSV") {
  StudyConfig cfg{InterpolationLaw(Potential::gaussian(4.0, 1), Potential::gaussian(1.0, 1),
                                   Schedule::quadratic_piecewise(1.0))};
  cfg.kappas = {0.2, 0.1, 0.05};
  cfg.h = 0.1;
  cfg.chains = 400;
  cfg.seed = 9;
  const StudyResult r = bias_scaling_study(cfg);
  REQUIRE(r.rows.size() == 3);
  for (const StudyRow& row : r.rows) {
    CHECK(row.ok);
    CHECK(row.floor_adjusted_bias >= 0.0);
    CHECK(row.bound_thm_annealed == doctest::Approx(row.kappa / 4.0 * r.action_bound));
    CHECK(std::isfinite(row.bound_lsi));
  }
  std::ostringstream os;
  write_study_csv(os, r);
  CHECK(os.str().rfind("kappa,raw_bias,floor_adjusted_bias,bound_thm_annealed,bound_lsi,slope_fit_flag\n", 0) == 0);
}
