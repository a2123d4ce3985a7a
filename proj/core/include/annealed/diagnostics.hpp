#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "annealed/bounds.hpp"
#include "annealed/sampler.hpp"

namespace annealed {

struct GaussianDivergences {
  double kl = 0.0;     // KL(N(m1, S1) || N(m2, S2))
  double w2_sq = 0.0;  // squared Bures-Wasserstein distance
};

// Throws DomainError when either covariance is not positive definite.
GaussianDivergences gaussian_divergences(const Vector& m1, const Matrix& s1, const Vector& m2, const Matrix& s2);

// Sample summary against a reference law. Divergences between Gaussian fits
// are proxies; kl_gaussianized is KL(reference fit || sample fit).
struct EmpiricalReport {
  int samples = 0;
  int dim = 0;
  Vector mean;
  Vector mean_se;
  Matrix covariance;
  Vector reference_mean;
  Matrix reference_covariance;
  std::optional<double> kl_gaussianized;
  std::optional<double> w2_gaussian;
  // d = 1 only.
  std::optional<double> w2_exact_1d;  // sorted coupling
  // Total variation of the Gaussian fits, normalized as the integral of |p - q|.
  std::optional<double> tv_fits_1d;
  std::optional<double> pinsker;  // sqrt(2 KL), bounds tv_fits_1d
  std::vector<std::string> flags;

  nlohmann::json to_json() const;
};

// Needs at least 100 samples.
EmpiricalReport empirical_report(const PointBatch& samples, const Potential& reference,
                                 std::uint64_t seed = 0x5eed);
EmpiricalReport empirical_report(const PointBatch& samples, const PointBatch& reference);

// Integral of |N(m1, v1) - N(m2, v2)| on the line.
double gaussian_l1_distance_1d(double m1, double v1, double m2, double v2);

struct StudyConfig {
  InterpolationLaw law;
  std::vector<double> kappas;
  double h = 0.02;  // SDE step size at the coarse level
  int chains = 10000;
  std::uint64_t seed = 0;
  std::optional<double> eps_end;
  SnisConfig snis;
  QuadratureConfig quad;
};

struct StudyRow {
  double kappa = 0.0;
  int steps = 0;  // coarse level; the fine level uses 2 * steps
  double raw_bias = kNaN;
  double raw_bias_half = kNaN;
  double floor = kNaN;
  double floor_adjusted_bias = kNaN;
  double bound_thm_annealed = kNaN;
  double bound_lsi = kNaN;
  bool ok = false;
  bool in_fit = false;
  double residual = kNaN;  // of the log-log fit
  std::string error;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double slope = kNaN;  // least squares of log(adjusted bias) on log(kappa)
  double intercept = kNaN;
  double action_bound = kNaN;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

// Runs each kappa at h and h/2 and reports the gaussianized KL against the
// exact interpolant at the reached time.
StudyResult bias_scaling_study(const StudyConfig& cfg);

void write_study_csv(std::ostream& os, const StudyResult& r);

}  // namespace annealed
