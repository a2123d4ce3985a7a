#include <cmath>
#include <sstream>

#include "annealed/errors.hpp"
#include "annealed/sampler.hpp"
#include "generators.hpp"

using namespace annealed;

namespace {

SdeRun gaussian_run(double tau2, int d) {
  return SdeRun{InterpolationLaw(Potential::gaussian(tau2, d), Potential::gaussian(1.0, d),
                                 Schedule::quadratic_piecewise(1.0))};
}

double column_variance(const PointBatch& x, int k) {
  const double m = x.col(k).mean();
  return (x.col(k).array() - m).square().sum() / (x.rows() - 1);
}

}  // namespace

TEST_CASE("terminal samples match a Gaussian target") {
  SdeRun run = gaussian_run(4.0, 2);
  run.kappa = 0.05;
  run.steps = 400;
  run.chains = 4000;
  run.seed = 11;
  const TrajectoryBatch b = run_annealed(run);
  REQUIRE(b.terminal.rows() == 4000);
  CHECK(b.eps_end == 0.0);
  CHECK(b.end_time == doctest::Approx(1.0));
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(b.terminal.col(k).mean()) < 0.12);
    CHECK(column_variance(b.terminal, k) == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("runs are reproducible and independent of the thread count") {
  SdeRun run = gaussian_run(2.0, 1);
  run.steps = 50;
  run.chains = 64;
  run.seed = 5;
  run.snapshot_times = {0.5};
  const TrajectoryBatch a = run_annealed(run), b = run_annealed(run);
  CHECK(a.terminal == b.terminal);
  REQUIRE(a.snapshots.size() == 1);
  CHECK(a.snapshots[0].points == b.snapshots[0].points);
  std::ostringstream sa, sb;
  write_terminal_csv(sa, a);
  write_terminal_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("chain,coord,value\n", 0) == 0);
  run.seed = 6;
  CHECK(run_annealed(run).terminal != a.terminal);
}

TEST_CASE("SNIS path runs for a target without a closed form") {
  SdeRun run{InterpolationLaw(Potential::student(4.0, 1.0, 1), Potential::gaussian(1.0, 1),
                              Schedule::quadratic_piecewise(1.0))};
  run.steps = 20;
  run.chains = 8;
  run.snis.particles = 256;
  const TrajectoryBatch b = run_annealed(run);
  CHECK(b.terminal.allFinite());
  CHECK(b.stats.at(0).snis_calls > 0);
}

TEST_CASE("step size and default eps_end") {
  SdeRun run = gaussian_run(1.0, 1);
  run.kappa = 0.25;
  run.steps = 10;
  CHECK(step_size(run, 0.0) == doctest::Approx(0.4));
  CHECK(default_eps_end(run.law, 0.25, 10) == 0.0);
  const InterpolationLaw rough(Potential::uniform_ball(1.0, 1), Potential::gaussian(1.0, 1),
                               Schedule::quadratic_piecewise(2.0));
  // the uniform ball has a closed-form interpolant but no score at lambda = 1
  CHECK(default_eps_end(rough, 0.25, 9) == doctest::Approx(0.2));
}

TEST_CASE("invalid runs are rejected") {
  SdeRun run = gaussian_run(1.0, 1);
  run.kappa = 1.0;
  CHECK_THROWS_AS(run_annealed(run), DomainError);
  run.kappa = 0.5;
  run.chains = 0;
  CHECK_THROWS_AS(run_annealed(run), DomainError);
}

TEST_CASE("a stiff target with a huge step diverges loudly") {
  SdeRun run = gaussian_run(1e-6, 1);
  run.kappa = 0.5;
  run.steps = 200;
  run.chains = 4;
  CHECK_THROWS_AS(run_annealed(run), DivergenceError);
}

TEST_CASE("forward OU marginals") {
  gen::for_all(10, 61, [](gen::Gen& g, int) {
    const double v = g.log_uniform(0.1, 10.0), t = g.uniform(0.0, 3.0);
    const int d = g.integer(1, 3);
    const OuMarginal m = ou_forward(Potential::gaussian(v, d), t);
    const double vt = std::exp(-2.0 * t) * v + 1.0 - std::exp(-2.0 * t);
    REQUIRE(m.kl_to_standard);
    CHECK(*m.kl_to_standard == doctest::Approx(gaussian_kl_to_standard(vt, d)).epsilon(1e-12));
    CHECK(*m.kl_to_standard <= gaussian_kl_to_standard(v, d) * std::exp(-2.0 * t) * (1.0 + 1e-12) + 1e-15);
  });
  CHECK(gaussian_kl_to_standard(4.0, 1) == doctest::Approx((3.0 - std::log(4.0)) / 2.0));
  CHECK_THROWS_AS(ou_forward(Potential::student(3.0, 1.0, 1), 1.0), UnsupportedOperation);
}
