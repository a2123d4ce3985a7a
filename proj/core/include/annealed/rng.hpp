#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace annealed {

std::uint64_t splitmix64(std::uint64_t x);

// Independent generator for (seed, stream). Streams never share state.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double gamma(double shape);
  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Number of worker threads: ANNEALED_THREADS if set, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n) across worker threads. Each index is handled
// by exactly one call; callers write results into per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace annealed
