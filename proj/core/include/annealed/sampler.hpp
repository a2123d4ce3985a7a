#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "annealed/interpolation.hpp"

namespace annealed {

struct SdeRun {
  InterpolationLaw law;
  double kappa = 0.1;
  int steps = 1000;  // N
  int chains = 1000;  // M
  std::uint64_t seed = 0;
  // Integrate up to (T - eps_end)/kappa. Default: 0 when the terminal score is
  // available in closed form, else one step (kappa h).
  std::optional<double> eps_end;
  // Schedule times in [0, T] at which the whole batch is recorded.
  std::vector<double> snapshot_times;
  // When the configured proposal degenerates, the other one is tried before failing.
  SnisConfig snis;
};

struct Snapshot {
  int step = 0;
  double time = 0.0;  // schedule time kappa * s
  PointBatch points;
};

struct ChainStats {
  long snis_calls = 0;
  double min_ess = 0.0;
  double mean_ess = 0.0;
};

struct TrajectoryBatch {
  PointBatch terminal;  // M x d
  std::vector<Snapshot> snapshots;
  std::vector<ChainStats> stats;
  double step_size = 0.0;  // h in SDE time
  double eps_end = 0.0;
  double end_time = 0.0;   // schedule time reached
};

// Step size h = (T - eps_end) / (kappa N).
double step_size(const SdeRun& run, double eps_end);
// eps_end used when the run does not set one.
double default_eps_end(const InterpolationLaw& law, double kappa, int steps);

// Euler-Maruyama for dY = score(kappa s, Y) ds + sqrt(2) dB with Y_0 drawn from
// the lambda_0 interpolant. Chain c uses its own stream of run.seed.
TrajectoryBatch run_annealed(const SdeRun& run);

void write_terminal_csv(std::ostream& os, const TrajectoryBatch& batch);
void write_snapshots_csv(std::ostream& os, const TrajectoryBatch& batch);

// Forward OU marginal e^{-t} X_0 + sqrt(1 - e^{-2t}) G.
struct OuMarginal {
  Potential law;
  double t = 0.0;
  // KL(marginal, N(0, I)) for Gaussian initial laws.
  std::optional<double> kl_to_standard;
  PointBatch sample(int n, std::uint64_t seed) const { return sample_measure(law, n, seed); }
};

OuMarginal ou_forward(const Potential& initial, double t);

// KL(N(0, v I) || N(0, I)) in dimension d.
double gaussian_kl_to_standard(double variance, int dim);

}  // namespace annealed
