#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "annealed/measures.hpp"
#include "annealed/schedule.hpp"

namespace annealed {

enum class HessianForm { w_form, u_form, mixed };

std::string to_string(HessianForm f);

struct SnisConfig {
  int particles = 4096;
  double ess_fraction = 0.05;
  int blocks = 32;
  std::uint64_t seed = 0;
  // Propose from the base (y = x - sqrt(1-lambda) Z) instead of the target.
  bool swapped = false;
  // Expression used for the score (w_form or u_form) or Hessian.
  HessianForm form = HessianForm::w_form;
  // Hessian only: also evaluate check_form and report the discrepancy.
  bool cross_check = false;
  HessianForm check_form = HessianForm::u_form;
};

struct ScoreEstimate {
  Vector value;
  Vector std_error;
  std::string estimator;  // "closed_form" or "snis"
  double ess = 0.0;
};

struct HessianEstimate {
  Matrix value;
  Matrix std_error;
  std::string estimator;
  HessianForm form = HessianForm::w_form;
  double ess = 0.0;
  // Max abs entrywise difference between form and check_form.
  std::optional<double> discrepancy;
  std::optional<Matrix> check_value;
  std::optional<Matrix> check_std_error;
};

struct WeightedBatch {
  PointBatch points;
  Vector weights;  // normalized
  double ess = 0.0;
};

class InterpolationLaw {
 public:
  InterpolationLaw(Potential target, Potential base, Schedule schedule);
  static InterpolationLaw from_json(const nlohmann::json& j);

  const Potential& target() const { return target_; }
  const Potential& base() const { return base_; }
  const Schedule& schedule() const { return schedule_; }
  int dim() const { return target_.dim(); }
  double lambda_at(double t) const { return schedule_.lambda(t); }

  // Closed-form log-density and score exist for every lambda in (0,1).
  bool has_closed_form() const { return kind_ != Kind::none; }

  // Allocation-light closed-form evaluation; false when no closed form exists.
  bool closed_form_score(double lambda, const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  std::optional<double> closed_form_log_density(double lambda, const Vector& x) const;
  std::optional<Matrix> closed_form_hessian(double lambda, const Vector& x) const;

 private:
  enum class Kind { none, mixture, compact };
  struct Component {
    double log_weight;
    Vector target_mean;
    Vector base_mean;
  };
  Potential target_;
  Potential base_;
  Schedule schedule_;
  Kind kind_ = Kind::none;
  // mixture closed form
  std::vector<Component> components_;
  double target_var_ = 0.0;
  double base_var_ = 0.0;
  // compact closed form: X_t = c U + N(0, alpha^2), U uniform on B(0, R)
  bool compact_is_target_ = true;
  double compact_radius_ = 0.0;
  double compact_smoothing_ = 0.0;
  double gaussian_var_ = 0.0;

  void compact_params(double lambda, double& rho, double& alpha2) const;
};

PointBatch sample_interpolant(const InterpolationLaw& law, double t, int n, std::uint64_t seed);

double log_density(const InterpolationLaw& law, double t, const Vector& x);
double log_density_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x);

ScoreEstimate score(const InterpolationLaw& law, double t, const Vector& x, const SnisConfig& cfg = {});
ScoreEstimate score_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x,
                              const SnisConfig& cfg = {});
// SNIS even when a closed form exists.
ScoreEstimate snis_score(const InterpolationLaw& law, double lambda, const Vector& x, const SnisConfig& cfg);

HessianEstimate hessian_log_density(const InterpolationLaw& law, double t, const Vector& x,
                                    const SnisConfig& cfg = {});
HessianEstimate hessian_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x,
                                  const SnisConfig& cfg = {});
HessianEstimate snis_hessian(const InterpolationLaw& law, double lambda, const Vector& x, const SnisConfig& cfg);

WeightedBatch conditional_sample(const InterpolationLaw& law, double t, const Vector& x, int n,
                                 std::uint64_t seed, bool swapped = false);
WeightedBatch conditional_sample_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x, int n,
                                           std::uint64_t seed, bool swapped = false);

}  // namespace annealed
