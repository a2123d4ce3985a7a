#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include "json.hpp"
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "annealed/rng.hpp"

namespace annealed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointBatch = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GaussianFamily {
  double variance = 1.0;
};
struct GaussianMixtureFamily {
  std::vector<double> weights;
  std::vector<Vector> means;
  double variance = 1.0;
};
struct StudentFamily {
  double alpha = 3.0;
  double sigma = 1.0;
};
// H(x) = (1+|x|^2)^{alpha/2} + log z
struct SubbotinFamily {
  double alpha = 1.0;
};
struct UniformBallFamily {
  double radius = 1.0;
};
// Uniform law on B(0, radius) convolved with N(0, smoothing_variance I).
struct CompactGaussianConvolutionFamily {
  double radius = 0.0;
  double smoothing_variance = 1.0;
};

using FamilyParams = std::variant<GaussianFamily, GaussianMixtureFamily, StudentFamily, SubbotinFamily,
                                  UniformBallFamily, CompactGaussianConvolutionFamily>;

struct PotentialEval {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

class Potential {
 public:
  static Potential gaussian(double variance, int dim);
  static Potential gaussian_mixture(std::vector<double> weights, std::vector<Vector> means, double variance);
  static Potential student(double alpha, double sigma, int dim);
  static Potential subbotin(double alpha, int dim);
  static Potential uniform_ball(double radius, int dim);
  static Potential compact_gaussian_convolution(double radius, double smoothing_variance, int dim);

  static Potential from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const FamilyParams& params() const { return params_; }
  std::string family_name() const;
  int dim() const { return dim_; }
  // Has a twice differentiable closed-form potential.
  bool smooth() const;
  // Mean vector is zero.
  bool centered() const;
  double log_normalizer() const { return log_z_; }

  // H including the normalizer, its gradient and Hessian.
  PotentialEval eval(const Vector& x) const;
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  // Radial profile h with H(x) = h(|x|) for radial families.
  bool radial() const;
  double radial_value(double r) const;

  template <class F>
  bool is() const {
    return std::holds_alternative<F>(params_);
  }
  template <class F>
  const F& as() const {
    return std::get<F>(params_);
  }

 private:
  Potential(FamilyParams p, int dim);
  void require_smooth(const char* op) const;
  FamilyParams params_;
  int dim_ = 1;
  double log_z_ = 0.0;
};

struct QuasiConvexity {
  double alpha = 0.0;
  double beta = 1.0;
  double radius = 0.0;
};

struct DriftGrowth {
  double kappa = 0.0;
  double beta = 1.0;
};

struct SmoothnessProfile {
  int dim = 1;
  double grad_sup = kInf;                      // M
  double hess_upper = kInf;                    // C
  double hess_lower = -kInf;                   // D
  double hess_lower_at_infinity = -kInf;       // D^R
  double convexity_radius = 0.0;               // R for D^R
  double grad_lipschitz = kInf;                // L
  std::optional<QuasiConvexity> quasiconvex;
  std::optional<DriftGrowth> drift_growth;
  std::optional<double> poincare_constant;     // C_P
  std::optional<double> logsobolev_constant;   // C_LS
  // Two-sided bound |nabla^2 H| <= hess_abs().
  double hess_abs() const;
};

SmoothnessProfile closed_form_profile(const Potential& p);
// closed_form_profile when the family has one, else a profile with only dim set.
SmoothnessProfile known_profile(const Potential& p);
// inf over |x| >= r of the smallest Hessian eigenvalue, exact for radial families.
double hess_lower_beyond(const Potential& p, double r);
// Profile whose D^R is taken at the given radius.
SmoothnessProfile with_convexity_radius(const Potential& p, SmoothnessProfile prof, double r);

struct CheckOutcome {
  std::string name;
  bool passed = true;
  double worst_value = 0.0;  // worst observed quantity
  double declared = 0.0;     // declared constant it is compared with
  Vector worst_point;
};

struct VerificationReport {
  std::vector<CheckOutcome> checks;
  bool passed() const;
  const CheckOutcome& check(const std::string& name) const;
};

VerificationReport verify_profile(const Potential& p, const SmoothnessProfile& prof, const PointBatch& grid,
                                  double tol = 1e-12);
// n points along rays through the origin: radii in [0, r_max] spread over a
// fixed set of directions (coordinate axes and diagonals).
PointBatch canonical_radial_grid(int dim, int n, double r_max);

PointBatch sample_measure(const Potential& p, int n, std::uint64_t seed);
// One exact draw written into out (size dim).
void draw(const Potential& p, Rng& rng, Eigen::Ref<Vector> out);

struct MomentSummary {
  double mean_abs = 0.0;       // m
  double second_moment = 0.0;  // V
  Vector mean;
  Matrix covariance;
  bool second_moment_is_upper_bound = false;
};

MomentSummary moments(const Potential& p);
// Probability of B(0, r).
double ball_mass(const Potential& p, double r);
// Osc of H over B(0, r) for radial nondecreasing families.
double oscillation_on_ball(const Potential& p, double r);

}  // namespace annealed
