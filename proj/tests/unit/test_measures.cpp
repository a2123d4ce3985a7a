#include <cmath>

#include "annealed/errors.hpp"
#include "annealed/finite_difference.hpp"
#include "annealed/measures.hpp"
#include "annealed/quadrature.hpp"
#include "generators.hpp"

using namespace annealed;

TEST_CASE("gradient and hessian agree with finite differences") {
  gen::for_all(40, 11, [](gen::Gen& g, int) {
    const int d = g.integer(1, 3);
    const Potential p = g.smooth(d);
    const Vector x = g.vector(d, 2.0);
    const PotentialEval e = p.eval(x);
    const auto fd = fd_gradient([&](const Vector& y) { return p.value(y); }, x, 1e-3);
    for (int i = 0; i < d; ++i) CHECK(e.gradient(i) == doctest::Approx(fd.value(i)).epsilon(1e-6).scale(1.0));
    const auto fh = fd_hessian([&](const Vector& y) { return p.value(y); }, x, 1e-3);
    CHECK((e.hessian - fh.value).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + e.hessian.norm()));
    CHECK((p.gradient(x) - e.gradient).norm() < 1e-12 * (1.0 + e.gradient.norm()));
  });
}

TEST_CASE("potentials are normalized in one dimension") {
  gen::for_all(20, 12, [](gen::Gen& g, int) {
    const Potential p = g.smooth(1);
    auto density = [&](double x) { return std::exp(-p.value(Vector::Constant(1, x))); };
    QuadratureConfig q;
    q.abs_tol = 1e-11;
    CHECK(integrate_real_line(density, q).value == doctest::Approx(1.0).epsilon(1e-7));
  });
}

TEST_CASE("closed-form moments match quadrature in one dimension") {
  gen::for_all(20, 13, [](gen::Gen& g, int) {
    const Potential p = g.smooth(1);
    const MomentSummary m = moments(p);
    auto w = [&](double x, double f) { return f * std::exp(-p.value(Vector::Constant(1, x))); };
    QuadratureConfig q;
    q.abs_tol = 1e-11;
    const double mean = integrate_real_line([&](double x) { return w(x, x); }, q).value;
    const double second = integrate_real_line([&](double x) { return w(x, x * x); }, q).value;
    const double abs1 = integrate_real_line([&](double x) { return w(x, std::abs(x)); }, q).value;
    CHECK(m.mean(0) == doctest::Approx(mean).epsilon(1e-6).scale(1.0));
    CHECK(m.second_moment == doctest::Approx(second).epsilon(1e-6));
    CHECK(m.mean_abs == doctest::Approx(abs1).epsilon(1e-6));
    CHECK(m.covariance(0, 0) == doctest::Approx(second - mean * mean).epsilon(1e-6));
  });
}

TEST_CASE("exact sampler reproduces moments") {
  gen::for_all(8, 14, [](gen::Gen& g, int) {
    const int d = g.integer(1, 3);
    const Potential p = g.smooth(d);
    const MomentSummary m = moments(p);
    const int n = 40000;
    const PointBatch x = sample_measure(p, n, 5);
    const Vector mean = x.colwise().mean().transpose();
    const double second = x.rowwise().squaredNorm().mean();
    // Loose: heavy tails make the second-moment estimate noisy.
    CHECK((mean - m.mean).norm() < 6.0 * std::sqrt(m.second_moment / n) + 1e-12);
    CHECK(second == doctest::Approx(m.second_moment).epsilon(0.15));
  });
}

TEST_CASE("sampling is reproducible per seed") {
  const Potential p = Potential::student(3.0, 1.0, 2);
  const PointBatch a = sample_measure(p, 100, 42), b = sample_measure(p, 100, 42), c = sample_measure(p, 100, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("declared profiles survive grid verification") {
  gen::for_all(30, 15, [](gen::Gen& g, int) {
    const int d = g.integer(1, 3);
    const Potential p = g.smooth(d);
    const VerificationReport r = verify_profile(p, closed_form_profile(p), canonical_radial_grid(d, 3000, 25.0));
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CAPTURE(p.family_name());
      CHECK(c.passed);
    }
  });
}

TEST_CASE("student constants") {
  for (int d : {1, 3}) {
    const Potential p = Potential::student(3.0, 1.0, d);
    const SmoothnessProfile prof = closed_form_profile(p);
    CHECK(prof.grad_sup == doctest::Approx((3.0 + d) / (2.0 * std::sqrt(3.0))));
    CHECK(prof.hess_upper == doctest::Approx((3.0 + d) / 3.0));
    // The declared lower value is the exact minimum, inside the looser textbook band.
    CHECK(prof.hess_lower >= -(3.0 + d) / 6.0);
  }
}

TEST_CASE("ball mass matches sampling") {
  gen::for_all(10, 16, [](gen::Gen& g, int) {
    const int d = g.integer(1, 3);
    const Potential p = g.smooth(d);
    const double r = g.uniform(0.3, 3.0);
    const PointBatch x = sample_measure(p, 20000, 9);
    const double frac = (x.rowwise().norm().array() <= r).cast<double>().mean();
    CHECK(std::abs(ball_mass(p, r) - frac) < 0.015);
  });
}

TEST_CASE("json round trip and schema errors") {
  const Potential p = Potential::student(3.0, 2.0, 2);
  const Potential q = Potential::from_json(p.to_json());
  CHECK(q.family_name() == "student");
  CHECK(q.value(Vector::Ones(2)) == doctest::Approx(p.value(Vector::Ones(2))));

  auto path_of = [](const nlohmann::json& j) {
    try {
      Potential::from_json(j);
    } catch (const SchemaError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  CHECK(path_of({{"family", "gaussian"}, {"dim", 2}}) == "variance");
  CHECK(path_of({{"family", "gaussian"}, {"variance", -1.0}, {"dim", 2}}) == "variance");
  CHECK(path_of({{"family", "subbotin"}, {"alpha", 3.0}, {"dim", 1}}) == "alpha");
  CHECK(path_of({{"family", "nope"}, {"dim", 1}}) == "family");
}

TEST_CASE("non-smooth families refuse pointwise evaluation") {
  const Potential u = Potential::uniform_ball(1.0, 2);
  CHECK_THROWS_AS(u.value(Vector::Zero(2)), UnsupportedOperation);
  CHECK_FALSE(u.smooth());
  CHECK(ball_mass(u, 0.5) == doctest::Approx(0.25));
}
