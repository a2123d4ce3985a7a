#include "annealed/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "annealed/errors.hpp"

namespace annealed {
namespace {

constexpr double kDivergenceRadius = 1e6;

std::string real17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool terminal_score_available(const InterpolationLaw& law) {
  if (law.schedule().lambdaT() < 1.0) return true;
  if (law.target().smooth()) return true;
  Vector out(law.dim());
  return law.closed_form_score(1.0, Vector::Zero(law.dim()), out);
}

}  // namespace

double default_eps_end(const InterpolationLaw& law, double kappa, int steps) {
  (void)kappa;
  if (terminal_score_available(law)) return 0.0;
  // eps_end = kappa h with h = T / (kappa (N + 1))
  return law.schedule().horizon() / (steps + 1.0);
}

double step_size(const SdeRun& run, double eps_end) {
  return (run.law.schedule().horizon() - eps_end) / (run.kappa * run.steps);
}

TrajectoryBatch run_annealed(const SdeRun& run) {
  if (!(run.kappa > 0.0 && run.kappa < 1.0)) throw DomainError("run_annealed: kappa must lie in (0,1)");
  if (run.steps < 1 || run.chains < 1) throw DomainError("run_annealed: steps and chains must be positive");
  const InterpolationLaw& law = run.law;
  const double T = law.schedule().horizon();
  const double eps_end = run.eps_end.value_or(default_eps_end(law, run.kappa, run.steps));
  if (!(eps_end >= 0.0 && eps_end < T)) throw DomainError("run_annealed: eps_end must lie in [0, T)");
  const double h = step_size(run, eps_end);
  const int d = law.dim();
  const int N = run.steps;
  const int M = run.chains;

  TrajectoryBatch out;
  out.step_size = h;
  out.eps_end = eps_end;
  out.end_time = T - eps_end;
  out.terminal.resize(M, d);
  out.stats.assign(M, ChainStats{});

  std::vector<int> snap_steps;
  for (double t : run.snapshot_times) {
    if (!(t >= 0.0 && t <= T)) throw DomainError("run_annealed: snapshot time outside [0, T]");
    const int k = std::clamp(static_cast<int>(std::lround(t / (run.kappa * h))), 0, N);
    snap_steps.push_back(k);
  }
  for (int k : snap_steps) out.snapshots.push_back({k, run.kappa * h * k, PointBatch(M, d)});

  const double lambda0 = law.schedule().lambda0();
  const double sqrt2h = std::sqrt(2.0 * h);
  const bool closed = law.has_closed_form();

  parallel_for(static_cast<std::size_t>(M), [&](std::size_t ci) {
    const int c = static_cast<int>(ci);
    Rng rng(run.seed, static_cast<std::uint64_t>(c) + 1);
    Vector y(d), x(d), z(d), g(d);
    draw(law.base(), rng, z);
    if (lambda0 > 0.0) {
      draw(law.target(), rng, x);
      y = std::sqrt(lambda0) * x + std::sqrt(1.0 - lambda0) * z;
    } else {
      y = z;
    }
    ChainStats& st = out.stats[c];
    double ess_sum = 0.0;
    st.min_ess = kInf;
    auto record = [&](int k) {
      for (std::size_t s = 0; s < snap_steps.size(); ++s)
        if (snap_steps[s] == k) out.snapshots[s].points.row(c) = y.transpose();
    };
    record(0);
    for (int k = 0; k < N; ++k) {
      const double lambda = law.lambda_at(run.kappa * h * k);
      if (!(closed && law.closed_form_score(lambda, y, g))) {
        SnisConfig cfg = run.snis;
        cfg.seed = splitmix64(run.seed ^ splitmix64((static_cast<std::uint64_t>(c) << 32) + k));
        try {
          ScoreEstimate e;
          try {
            e = score_at_lambda(law, lambda, y, cfg);
          } catch (const DegenerateWeights&) {
            // One proposal usually degenerates near each end of the path; try the other.
            cfg.swapped = !cfg.swapped;
            e = score_at_lambda(law, lambda, y, cfg);
          }
          g = e.value;
          if (e.estimator == "snis") {
            ++st.snis_calls;
            ess_sum += e.ess;
            st.min_ess = std::min(st.min_ess, e.ess);
          }
        } catch (const DegenerateWeights& e) {
          throw DegenerateWeights(std::string(e.what()) + " [chain " + std::to_string(c) + ", step " +
                                  std::to_string(k) + "]");
        }
      }
      for (int i = 0; i < d; ++i) y(i) += h * g(i) + sqrt2h * rng.normal();
      const double r = y.norm();
      if (!std::isfinite(r) || r > kDivergenceRadius) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "run_annealed: chain %d diverged at step %d (|Y| = %.6g)", c, k + 1, r);
        throw DivergenceError(buf);
      }
      record(k + 1);
    }
    if (st.snis_calls > 0) st.mean_ess = ess_sum / st.snis_calls;
    else st.min_ess = 0.0;
    out.terminal.row(c) = y.transpose();
  });
  return out;
}

void write_terminal_csv(std::ostream& os, const TrajectoryBatch& batch) {
  os << "chain,coord,value\n";
  for (Eigen::Index c = 0; c < batch.terminal.rows(); ++c)
    for (Eigen::Index i = 0; i < batch.terminal.cols(); ++i)
      os << c << ',' << i << ',' << real17(batch.terminal(c, i)) << '\n';
}

void write_snapshots_csv(std::ostream& os, const TrajectoryBatch& batch) {
  os << "chain,step,time,coord,value\n";
  for (const auto& s : batch.snapshots)
    for (Eigen::Index c = 0; c < s.points.rows(); ++c)
      for (Eigen::Index i = 0; i < s.points.cols(); ++i)
        os << c << ',' << s.step << ',' << real17(s.time) << ',' << i << ',' << real17(s.points(c, i)) << '\n';
}

double gaussian_kl_to_standard(double v, int dim) {
  if (!(v > 0.0) || dim < 1) throw DomainError("gaussian_kl_to_standard: need v > 0, d >= 1");
  // v - 1 - ln v, accurate near v = 1
  return 0.5 * dim * ((v - 1.0) - std::log1p(v - 1.0));
}

OuMarginal ou_forward(const Potential& initial, double t) {
  if (!(t >= 0.0)) throw DomainError("ou_forward: t must be nonnegative");
  const double e = std::exp(-t);
  const double noise = -std::expm1(-2.0 * t);
  const int d = initial.dim();
  if (initial.is<GaussianFamily>()) {
    const double v = e * e * initial.as<GaussianFamily>().variance + noise;
    return {Potential::gaussian(v, d), t, gaussian_kl_to_standard(v, d)};
  }
  if (initial.is<GaussianMixtureFamily>()) {
    const auto& m = initial.as<GaussianMixtureFamily>();
    std::vector<Vector> means;
    for (const auto& mu : m.means) means.push_back(e * mu);
    return {Potential::gaussian_mixture(m.weights, std::move(means), e * e * m.variance + noise), t, std::nullopt};
  }
  throw UnsupportedOperation("ou_forward: initial law must be gaussian or gaussian_mixture, got " +
                             initial.family_name());
}

}  // namespace annealed
