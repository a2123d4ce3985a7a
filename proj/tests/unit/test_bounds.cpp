#include <cmath>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"
#include "annealed/oracle.hpp"
#include "generators.hpp"

using namespace annealed;

namespace {

const PoincareMethod kMethods[] = {PoincareMethod::mutual_convexity, PoincareMethod::miclo,
                                   PoincareMethod::reflection, PoincareMethod::convex_infinity,
                                   PoincareMethod::direct};

}  // namespace

TEST_CASE("score bound dominates the SNIS score") {
  gen::for_all(10, 51, [](gen::Gen& g, int) {
    const int d = g.integer(1, 2);
    const InterpolationLaw law(g.student(d), g.coin() ? g.gaussian(d) : Potential::subbotin(g.uniform(0.8, 1.0), d),
                               Schedule::quadratic_piecewise(1.0));
    const double lambda = g.uniform(0.05, 0.95);
    const BoundReport r = score_sup_bound(closed_form_profile(law.base()), closed_form_profile(law.target()), lambda);
    REQUIRE(r.applies);
    for (int k = 0; k < 5; ++k) {
      SnisConfig cfg;
      cfg.particles = 4000;
      cfg.ess_fraction = 0.01;
      cfg.swapped = lambda > 0.5;
      cfg.seed = static_cast<std::uint64_t>(k);
      const Vector x = g.vector(d, 2.0);
      ScoreEstimate e;
      try {
        e = snis_score(law, lambda, x, cfg);
      } catch (const DegenerateWeights&) {
        cfg.swapped = !cfg.swapped;
        e = snis_score(law, lambda, x, cfg);
      }
      CHECK(e.value.norm() <= r.value() + 5.0 * e.std_error.norm());
    }
  });
}

TEST_CASE("mutual convexity is exact for Gaussian pairs") {
  const SmoothnessProfile W = closed_form_profile(Potential::gaussian(1.0, 1));
  const BoundReport r = conditional_poincare(PoincareMethod::mutual_convexity, W, W, 0.5);
  REQUIRE(r.applies);
  CHECK(r.value() == 0.25);
  gen::for_all(10, 52, [](gen::Gen& g, int) {
    const double tau2 = g.log_uniform(0.2, 5.0), sigma2 = g.log_uniform(0.2, 5.0), lambda = g.uniform(0.05, 0.95);
    const BoundReport b = conditional_poincare(PoincareMethod::mutual_convexity,
                                               closed_form_profile(Potential::gaussian(sigma2, 1)),
                                               closed_form_profile(Potential::gaussian(tau2, 1)), lambda);
    CHECK(b.value() == doctest::Approx(1.0 / (1.0 / (lambda * tau2) + 1.0 / ((1.0 - lambda) * sigma2))));
  });
}

TEST_CASE("conditional Poincare bounds dominate the 1D oracle") {
  gen::for_all(12, 53, [](gen::Gen& g, int) {
    const Potential target = g.coin() ? g.student(1) : g.mixture(1);
    const double sigma2 = g.log_uniform(0.3, 3.0);
    const InterpolationLaw law(target, Potential::gaussian(sigma2, 1), Schedule::quadratic_piecewise(1.0));
    const SmoothnessProfile W = closed_form_profile(law.base()), U = closed_form_profile(target);
    ConditionalPoincareParams p;
    p.base_poincare = sigma2;
    for (int k = 0; k < 3; ++k) {
      const double lambda = g.uniform(0.1, 0.9), x = g.uniform(-3.0, 3.0);
      const double oracle = conditional_poincare_oracle(law, lambda, x).c_p;
      for (PoincareMethod m : kMethods) {
        const BoundReport r = conditional_poincare(m, W, U, lambda, p);
        CAPTURE(to_string(m));
        if (r.applies) CHECK(r.value() >= 0.99 * oracle);
      }
    }
  });
}

TEST_CASE("reports apply only inside their validity window") {
  const SmoothnessProfile W = closed_form_profile(Potential::gaussian(1.0, 1));
  const SmoothnessProfile U = closed_form_profile(Potential::student(3.0, 1.0, 1));
  ConditionalPoincareParams p;
  p.base_poincare = 1.0;
  for (PoincareMethod m : kMethods) {
    for (double lambda : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      const BoundReport r = conditional_poincare(m, W, U, lambda, p);
      CAPTURE(to_string(m));
      CAPTURE(lambda);
      if (r.applies) CHECK(r.validity.contains(lambda));
      if (!r.applies) CHECK(std::isinf(r.value()));
    }
  }
}

TEST_CASE("direct method: fixed epsilon never beats the optimized one") {
  const SmoothnessProfile W = closed_form_profile(Potential::gaussian(1.0, 1));
  const SmoothnessProfile U = closed_form_profile(Potential::student(3.0, 1.0, 1));
  ConditionalPoincareParams p;
  p.base_poincare = 1.0;
  const double best = conditional_poincare(PoincareMethod::direct, W, U, 0.7, p).value();
  for (double e : {0.1, 1.0, 10.0}) {
    p.epsilon = e;
    CHECK(conditional_poincare(PoincareMethod::direct, W, U, 0.7, p).value() >= best * (1.0 - 1e-12));
  }
  p.epsilon = -1.0;
  CHECK_THROWS_AS(conditional_poincare(PoincareMethod::direct, W, U, 0.7, p), DomainError);
}

TEST_CASE("Hessian band contains the closed-form Hessian spectrum") {
  gen::for_all(15, 54, [](gen::Gen& g, int) {
    const int d = g.integer(1, 2);
    const InterpolationLaw law(g.mixture(d), g.gaussian(d), Schedule::quadratic_piecewise(1.0));
    const double lambda = g.uniform(0.05, 0.95);
    const SmoothnessProfile W = closed_form_profile(law.base()), U = closed_form_profile(law.target());
    const BoundReport cp = conditional_poincare(PoincareMethod::mutual_convexity, W, U, lambda, {d});
    if (!cp.applies) return;
    const HessianBand band = hessian_band(W, U, lambda, cp.value());
    for (int k = 0; k < 20; ++k) {
      const Matrix h = *law.closed_form_hessian(lambda, g.vector(d, 3.0));
      const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues();
      CHECK(ev.minCoeff() >= band.lower - 1e-9);
      CHECK(ev.maxCoeff() <= band.upper + 1e-9);
    }
  });
}

TEST_CASE("Gaussian-compact band contains the closed-form Hessian") {
  gen::for_all(15, 55, [](gen::Gen& g, int) {
    const double R = g.uniform(0.0, 1.5), tau2 = R * R + g.log_uniform(0.05, 2.0), sigma2 = g.log_uniform(0.3, 3.0);
    const InterpolationLaw law(Potential::compact_gaussian_convolution(R, tau2, 1), Potential::gaussian(sigma2, 1),
                               Schedule::quadratic_piecewise(1.0));
    const double lambda = g.uniform(0.05, 0.95);
    const HessianBand band = gaussian_compact_band(sigma2, tau2, R, lambda);
    for (int k = 0; k < 20; ++k) {
      const double h = (*law.closed_form_hessian(lambda, g.vector(1, 3.0)))(0, 0);
      CHECK(h >= band.lower - 1e-9);
      CHECK(h <= band.upper + 1e-9);
    }
  });
}

TEST_CASE("Hessian band needs enough information") {
  SmoothnessProfile W = closed_form_profile(Potential::student(3.0, 1.0, 1));
  W.grad_sup = kInf;
  const SmoothnessProfile U = closed_form_profile(Potential::student(3.0, 1.0, 1));
  CHECK_THROWS_AS(hessian_band(W, known_profile(Potential::uniform_ball(1.0, 1)), 0.5), PreconditionError);
  CHECK_NOTHROW(hessian_band(W, U, 0.5, 2.0));
}

TEST_CASE("convolved LSI bound matches its closed form bit for bit") {
  for (double kappa : {0.1, 0.05}) {
    ConvolvedCase c;
    c.kappa = kappa;
    c.sigma2 = 1.0;
    c.tau2 = 1.0;
    c.radius = 0.5;
    c.T = 1.0;
    c.dim = 2;
    const BoundReport r = lsi_proposition_bounds(c);
    const double T = c.T, R = c.radius, tau2 = c.tau2, sigma2 = c.sigma2;
    const double d = c.dim, cls = r.constant("cls");
    CHECK(r.value() == (2.0 / (T * T)) * (R * R + (tau2 + sigma2) * d) * cls * (kappa * kappa));
  }
  ConvolvedCase bad;
  bad.kappa = 0.7;
  CHECK_THROWS_AS(lsi_proposition_bounds(bad), PreconditionError);
}

TEST_CASE("LSI flow closed forms agree with quadrature") {
  gen::for_all(10, 56, [](gen::Gen& g, int) {
    const double c0 = g.log_uniform(0.1, 3.0), k = g.log_uniform(0.1, 3.0), t = g.uniform(0.0, 3.0);
    const double a = g.log_uniform(0.5, 4.0);
    const double lc = lsi_flow(c0, RateProfile::constant_contraction(k), a, t);
    const double lq = lsi_flow(c0, RateProfile::contraction([k](double) { return k; }), a, t);
    CHECK(lc == doctest::Approx(lq).epsilon(1e-7));
    const double mc = lsi_flow(c0, RateProfile::constant_lipschitz(k), a, t);
    const double mq = lsi_flow(c0, RateProfile::lipschitz([k](double) { return k; }), a, t);
    CHECK(mc == doctest::Approx(mq).epsilon(1e-7));
  });
  CHECK(lsi_flow(1.0, RateProfile::constant_contraction(2.0), 4.0, kInf) == doctest::Approx(2.0));
}

TEST_CASE("OU entropy bound decays exponentially") {
  for (double T : {0.5, 1.0, 2.0}) CHECK(ou_entropy_bound(1.5, T) == doctest::Approx(1.5 * std::exp(-2.0 * T)));
  CHECK_THROWS_AS(ou_entropy_bound(-1.0, 1.0), DomainError);
}

TEST_CASE("Lyapunov bound for a Gaussian base dominates the oracle") {
  const InterpolationLaw law(Potential::student(3.0, 1.0, 1), Potential::gaussian(1.0, 1),
                             Schedule::quadratic_piecewise(1.0));
  const auto prob = lyapunov_problem(law.base(), law.target());
  REQUIRE(prob);
  const double mu = closed_form_profile(law.target()).grad_sup;
  for (double lambda : {0.3, 0.6, 0.9}) {
    const BoundReport r = conditional_rescale(*prob, lambda, mu);
    if (!r.applies) continue;
    for (double x : {-2.0, 0.0, 2.0}) CHECK(r.value() >= 0.99 * conditional_poincare_oracle(law, lambda, x).c_p);
  }
}

TEST_CASE("wellposedness report and CSV rows") {
  const InterpolationLaw law(Potential::gaussian(4.0, 2), Potential::gaussian(1.0, 2), Schedule::quadratic_piecewise(1.0));
  const BoundReport r = wellposedness_report(law, 0.1, {0.05, 0.1});
  CHECK(r.theorem == "wellposedness");
  REQUIRE(r.has("action_bound"));
  CHECK(r.constant("kl_bias") == doctest::Approx(0.1 / 4.0 * r.constant("action_bound")));
  const std::string row = bound_csv_row(0.5, 0.5, r);
  CHECK(row.find("wellposedness") != std::string::npos);
  CHECK(format_real(kInf) == "inf");
  CHECK(real_json(kNaN).is_string());
}
