#pragma once

#include <functional>
#include <string>
#include <variant>

#include "annealed/measures.hpp"
#include "annealed/quadrature.hpp"
#include "json.hpp"

namespace annealed {

// lambda = 2 s^2 on [0, 1/2], 1 - 2 (1-s)^2 on (1/2, 1], s = t/T
struct QuadraticPiecewise {};
// lambda = (1 + cos(pi (1 - s^alpha))) / 2
struct CosineSchedule {
  double alpha = 1.0;
};
// First half as quadratic, second half 1 - k^a - 2(1 - 2k^a)(1-s)^2.
struct LsiPlateau {
  double kappa = 0.01;
  double alpha = 0.5;
};
struct AffineClamped {
  double lambda0 = 0.0;
  double lambdaT = 1.0;
};

using ScheduleParams = std::variant<QuadraticPiecewise, CosineSchedule, LsiPlateau, AffineClamped>;

struct LambdaValue {
  double lambda = 0.0;
  double derivative = 0.0;  // right derivative at kinks
};

class Schedule {
 public:
  static Schedule quadratic_piecewise(double T);
  static Schedule cosine(double T, double alpha = 1.0);
  static Schedule lsi_plateau(double T, double kappa, double alpha);
  static Schedule affine_clamped(double T, double lambda0, double lambdaT);
  static Schedule from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double horizon() const { return T_; }
  const ScheduleParams& params() const { return params_; }
  std::string family_name() const;

  LambdaValue eval(double t) const;
  double lambda(double t) const { return eval(t).lambda; }
  double lambda0() const { return lambda(0.0); }
  double lambdaT() const { return lambda(T_); }
  // Interior kinks (used as quadrature breakpoints).
  std::vector<double> kinks() const;

  // lambda'^2 / lambda and lambda'^2 / (1 - lambda), simplified so endpoint
  // limits are exact (+inf where the true integrand blows up).
  double a0_density(double t) const;
  double a1_density(double t) const;

 private:
  Schedule(ScheduleParams p, double T);
  ScheduleParams params_;
  double T_ = 1.0;
};

struct ActionSummary {
  double A0 = 0.0;
  double A1 = 0.0;
  double action_bound = 0.0;
  bool centered = false;
  bool analytic = false;  // closed forms were substituted
  double V_pi = 0.0;
  double V_nu = 0.0;
  // Pointwise bound on |p'_t|^2.
  double pointwise(const Schedule& s, double t) const;
};

// A0, A1 from the closed forms when the family has them, otherwise quadrature.
ActionSummary action_integrals(const Schedule& s, const MomentSummary& pi_m, const MomentSummary& nu_m,
                               const QuadratureConfig& quad = {});
// Pure quadrature route, for cross-checking the closed forms.
std::pair<double, double> action_integrals_quadrature(const Schedule& s, const QuadratureConfig& quad = {});
// Contribution of [a, b] to A0 by quadrature.
double a0_partial(const Schedule& s, double a, double b, const QuadratureConfig& quad = {});

// (|lambda'|^2 / 2)(V_pi/lambda + V_nu/(1-lambda)), halved when centered.
double metric_derivative_bound(const Schedule& s, double t, double V_pi, double V_nu, bool centered = false);

}  // namespace annealed
