#include <cmath>

#include "annealed/errors.hpp"
#include "annealed/finite_difference.hpp"
#include "annealed/schedule.hpp"
#include "generators.hpp"

using namespace annealed;

TEST_CASE("schedule derivative matches finite differences") {
  gen::for_all(30, 21, [](gen::Gen& g, int) {
    const Schedule s = g.schedule();
    const double T = s.horizon();
    for (double frac : {0.1, 0.3, 0.45, 0.55, 0.8, 0.95}) {
      const double t = frac * T;
      const auto fd = fd_derivative([&](double u) { return s.lambda(u); }, t, 1e-4 * T);
      CHECK(s.eval(t).derivative == doctest::Approx(fd.value).epsilon(1e-6).scale(1.0));
    }
  });
}

TEST_CASE("schedule is monotone from lambda0 to lambdaT") {
  gen::for_all(30, 22, [](gen::Gen& g, int) {
    const Schedule s = g.schedule();
    double prev = s.lambda0();
    for (int i = 1; i <= 200; ++i) {
      const double l = s.lambda(s.horizon() * i / 200.0);
      CHECK(l >= prev - 1e-15);
      prev = l;
    }
    CHECK(s.lambda0() >= 0.0);
    CHECK(s.lambdaT() <= 1.0);
  });
}

TEST_CASE("endpoint densities equal lambda'^2 over lambda and 1 - lambda") {
  gen::for_all(30, 23, [](gen::Gen& g, int) {
    const Schedule s = g.schedule();
    for (double frac : {0.05, 0.3, 0.6, 0.9}) {
      const double t = frac * s.horizon();
      const LambdaValue v = s.eval(t);
      const double d2 = v.derivative * v.derivative;
      CHECK(s.a0_density(t) == doctest::Approx(d2 / v.lambda).epsilon(1e-10));
      CHECK(s.a1_density(t) == doctest::Approx(d2 / (1.0 - v.lambda)).epsilon(1e-10));
    }
  });
}

TEST_CASE("closed-form action integrals agree with quadrature") {
  gen::for_all(20, 24, [](gen::Gen& g, int) {
    const Schedule s = g.schedule();
    MomentSummary m;
    m.second_moment = 1.0;
    m.mean = Vector::Zero(1);
    const ActionSummary a = action_integrals(s, m, m);
    const auto [a0, a1] = action_integrals_quadrature(s);
    CHECK(a.A0 == doctest::Approx(a0).epsilon(1e-7));
    CHECK(a.A1 == doctest::Approx(a1).epsilon(1e-7));
  });
}

TEST_CASE("quadratic schedule: first half of A0 is 4/T") {
  for (double T : {0.5, 1.0, 3.0}) {
    const Schedule s = Schedule::quadratic_piecewise(T);
    CHECK(std::abs(a0_partial(s, 0.0, 0.5 * T) - 4.0 / T) < 1e-10);
  }
}

TEST_CASE("metric derivative of a Gaussian path stays below the pointwise bound") {
  gen::for_all(20, 25, [](gen::Gen& g, int) {
    const Schedule s = g.schedule();
    const int d = g.integer(1, 4);
    const double tau2 = g.log_uniform(0.2, 5.0), sigma2 = g.log_uniform(0.2, 5.0);
    for (int i = 1; i < 100; ++i) {
      const double t = s.horizon() * i / 100.0;
      const LambdaValue v = s.eval(t);
      const double a2 = v.lambda * tau2 + (1.0 - v.lambda) * sigma2;
      const double da = v.derivative * (tau2 - sigma2) / (2.0 * std::sqrt(a2));
      CHECK(d * da * da <= metric_derivative_bound(s, t, tau2 * d, sigma2 * d, true) * (1.0 + 1e-12));
    }
  });
}

TEST_CASE("schedule json") {
  const Schedule s = Schedule::from_json({{"family", "cosine"}, {"T", 2.0}, {"alpha", 1.5}});
  CHECK(s.family_name() == "cosine");
  CHECK(Schedule::from_json(s.to_json()).lambda(0.7) == doctest::Approx(s.lambda(0.7)));
  CHECK_THROWS_AS(Schedule::from_json({{"family", "cosine"}, {"T", -1.0}}), SchemaError);
  CHECK_THROWS_AS(s.eval(2.5), DomainError);
  CHECK_THROWS_AS(action_integrals(Schedule::affine_clamped(1.0, 0.0, 0.5), {}, {}), PreconditionError);
}
