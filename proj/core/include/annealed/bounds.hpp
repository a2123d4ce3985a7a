#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "annealed/interpolation.hpp"
#include "annealed/measures.hpp"
#include "annealed/quadrature.hpp"
#include "annealed/schedule.hpp"
#include "json.hpp"

namespace annealed {

struct Assumption {
  std::string name;
  bool satisfied = false;
  double witness = 0.0;
};

// Range of t or lambda on which a bound holds. Open ends are not tracked.
struct ValidityWindow {
  std::string variable = "lambda";
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;

  static ValidityWindow none(std::string variable = "lambda") { return {std::move(variable), 0.0, 0.0, true}; }
  static ValidityWindow range(double lo, double hi, std::string variable = "lambda") {
    return {std::move(variable), lo, hi, !(lo <= hi)};
  }
  bool contains(double v) const { return !empty && v >= lo && v <= hi; }
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct BoundReport {
  std::string theorem;
  NamedValues constants;
  ValidityWindow validity;
  std::vector<Assumption> assumptions;
  NamedValues trace;
  std::vector<std::string> notes;
  // The headline constant holds at the point the report was requested for.
  bool applies = false;

  void set(const std::string& name, double v);
  void add_trace(const std::string& name, double v) { trace.emplace_back(name, v); }
  void assume(const std::string& name, bool ok, double witness);
  bool has(const std::string& name) const;
  // Throws PreconditionError when missing.
  double constant(const std::string& name) const;
  // The "bound" constant, +inf when the report does not apply.
  double value() const;
  bool assumptions_hold() const;

  nlohmann::json to_json() const;
};

// Header and rows of the per-(t, bound) CSV export.
std::string bound_csv_header();
std::string bound_csv_row(double t, double lambda, const BoundReport& r);

// "%.17g"; non-finite values print as inf, -inf, nan.
std::string format_real(double v);
// JSON has no infinities or NaN; those become strings.
nlohmann::json real_json(double v);

// ---------------------------------------------------------------------------
// Score and Hessian bounds. W is the base potential, U the target potential.

// min((1-l)^{-1/2} M_W, l^{-1/2} M_U); constants "bound" and, when both M are
// finite, "uniform" = sqrt(2) max(M_W, M_U).
BoundReport score_sup_bound(const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda);

enum class BandStructure { generic, strictly_convex, gaussian, product };

struct HessianBand {
  double lower = -kInf;
  double upper = kInf;
  double lipschitz = kInf;  // sqrt(d) max(|lower|, |upper|)
  std::string upper_branch;  // which estimate produced the upper end
};

// Intersection of every applicable estimate. product_variances holds the
// coordinate variances sigma_i^2 for the product structure.
HessianBand hessian_band(const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda,
                         std::optional<double> poincare = std::nullopt,
                         BandStructure structure = BandStructure::generic,
                         const std::vector<double>& product_variances = {});

// Gaussian base N(0, sigma2) and target = (law on B(0,R)) * N(0, tau2).
HessianBand gaussian_compact_band(double sigma2, double tau2, double radius, double lambda, int dim = 1);

// ---------------------------------------------------------------------------
// Poincare constant of the conditional law.

enum class PoincareMethod { mutual_convexity, miclo, reflection, convex_infinity, direct };

std::string to_string(PoincareMethod m);

struct ConditionalPoincareParams {
  int dim = 1;
  std::optional<double> base_poincare;  // C_P(nu), direct method
  std::optional<double> epsilon;        // direct method; optimized over a log grid when empty
};

BoundReport conditional_poincare(PoincareMethod method, const SmoothnessProfile& W, const SmoothnessProfile& U,
                                 double lambda, const ConditionalPoincareParams& params = {});

// ---------------------------------------------------------------------------
// Lyapunov function bounds.

// C_P(mu_R) <= prefactor(d) R^2 e^{osc}; total (1 + C_P(mu_R)) / theta, or
// 1/theta + C_P(mu_R) when the normal derivative has the right sign.
BoundReport lyapunov_poincare(double theta, double radius, double osc_on_ball, int dim,
                              bool normal_derivative_sign_ok);

enum class ConvexVariant { none, klartag, radial, strict };

std::string to_string(ConvexVariant v);

// Everything needed to evaluate, and later rescale, the perturbed Lyapunov bound
// for mu = e^{-(W+U)}.
struct LyapunovProblem {
  QuasiConvexity w;  // <x, grad W> >= alpha |x|^beta for |x| >= radius
  DriftGrowth u;     // |<x, grad U>| <= kappa |x|^beta
  int dim = 1;
  std::function<double(double)> osc_w;      // Osc of W on B(0, r)
  std::function<double(double)> osc_u;      // Osc of U on B(0, r)
  std::function<double(double)> ball_mass;  // nu(B(0, r)), nu = e^{-W}
  double base_variance = 0.0;               // largest covariance eigenvalue of nu
  ConvexVariant variant = ConvexVariant::none;
  double c_klar = 16.0;
  // strict variant
  double strict_dw = 0.0;
  double strict_mu = 0.0;
};

struct LyapunovSearch {
  std::vector<double> gammas;  // default: 64-point log grid below c(W,U), plus its midpoint
  std::vector<double> radii;   // default: 64-point log grid above the feasibility radius
  int grid_points = 64;
};

BoundReport perturbed_lyapunov(const LyapunovProblem& problem, const LyapunovSearch& search = {});

// Problem for the conditional law at lambda (U enters through its gradient bound).
LyapunovProblem conditional_problem(const LyapunovProblem& problem, double lambda, double grad_sup_u);
BoundReport conditional_rescale(const LyapunovProblem& problem, double lambda, double grad_sup_u,
                                const LyapunovSearch& search = {});

// Builds the problem for the conditional law of (target U, base W) from the
// closed-form profiles; nullopt when the base is not quasi-convex.
std::optional<LyapunovProblem> lyapunov_problem(const Potential& base, const Potential& target,
                                                ConvexVariant variant = ConvexVariant::none);

struct LinearGrowth {
  double radius = 0.0;  // R_W
  double alpha = 0.0;
};

// For convex W with sup_{|y|<=1} |grad W| = M and |W(0)| = W0:
// <x, grad W(x)> >= alpha |x| for |x| >= R_W + 1.
LinearGrowth quantitative_convex_linear_growth(double grad_sup_unit_ball, double w0, int dim);

// ---------------------------------------------------------------------------
// Log-Sobolev flows.

struct RateProfile {
  enum class Kind { lipschitz, contraction };
  Kind kind = Kind::lipschitz;
  std::function<double(double)> rate;
  std::optional<double> constant;  // closed forms when the rate is constant

  static RateProfile lipschitz(std::function<double(double)> L) { return {Kind::lipschitz, std::move(L), {}}; }
  static RateProfile contraction(std::function<double(double)> K) {
    return {Kind::contraction, std::move(K), {}};
  }
  static RateProfile constant_lipschitz(double L);
  static RateProfile constant_contraction(double K);
};

// C_LS of a drifted Brownian motion at time t (t may be +inf for contractions).
double lsi_flow(double c_ls0, const RateProfile& rate, double diffusion_scale, double t,
                const QuadratureConfig& quad = {});

namespace lsi {
inline double translate(double c) { return c; }
inline double scale(double c, double a) { return a * a * c; }
inline double convolve(double c1, double c2, double lambda) { return lambda * c1 + (1.0 - lambda) * c2; }
inline double product(double c1, double c2) { return c1 > c2 ? c1 : c2; }
}  // namespace lsi

// (kappa/2) int_0^T mdot_sq(s) exp(-(1/kappa) int_s^T 1/cls(u/kappa) du) ds.
double lsi_kl_bias(const Schedule& schedule, double kappa, const std::function<double(double)>& cls_flow,
                   const std::function<double(double)>& mdot_sq, const QuadratureConfig& quad = {});

struct PlateauCase {
  double kappa = 0.01;
  double alpha = 0.5;
  double radius = 1.0;
  double T = 1.0;
  int dim = 1;
};
struct ConvolvedCase {
  double kappa = 0.01;
  double sigma2 = 1.0;
  double tau2 = 1.0;
  double radius = 0.0;
  double T = 1.0;
  int dim = 1;
};

BoundReport lsi_proposition_bounds(const PlateauCase& c);
BoundReport lsi_proposition_bounds(const ConvolvedCase& c);

// e^{-2T} KL0.
double ou_entropy_bound(double kl0, double T);

// ---------------------------------------------------------------------------
// End-to-end assumption check and bias bounds for a law and kappa.

double kl_bias_bound(double action_bound, double kappa);
double bl_bias_bound(double lambdaT, double m_pi, double m_nu, double kappa, double action_bound);

BoundReport wellposedness_report(const InterpolationLaw& law, double kappa, const std::vector<double>& eps_grid,
                                 const QuadratureConfig& quad = {});

}  // namespace annealed
