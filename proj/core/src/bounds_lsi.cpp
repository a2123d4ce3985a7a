#include <algorithm>
#include <cmath>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"

namespace annealed {

RateProfile RateProfile::constant_lipschitz(double L) {
  RateProfile r = lipschitz([L](double) { return L; });
  r.constant = L;
  return r;
}

RateProfile RateProfile::constant_contraction(double K) {
  RateProfile r = contraction([K](double) { return K; });
  r.constant = K;
  return r;
}

double lsi_flow(double c_ls0, const RateProfile& rate, double diffusion_scale, double t, const QuadratureConfig& quad) {
  if (!(c_ls0 >= 0.0)) throw DomainError("lsi_flow: initial constant must be nonnegative");
  if (!(diffusion_scale > 0.0)) throw DomainError("lsi_flow: diffusion scale must be positive");
  if (!(t >= 0.0)) throw DomainError("lsi_flow: time must be nonnegative");
  const bool contraction = rate.kind == RateProfile::Kind::contraction;
  if (!contraction && std::isinf(t)) throw DomainError("lsi_flow: Lipschitz branch needs finite time");

  if (rate.constant) {
    const double k = *rate.constant;
    if (contraction) {
      if (!(k > 0.0)) throw DomainError("lsi_flow: contraction rate K must be positive");
      if (std::isinf(t)) return diffusion_scale / k;
      const double e = std::exp(-k * t);
      return e * c_ls0 + diffusion_scale * (-std::expm1(-k * t)) / k;
    }
    if (k == 0.0) return c_ls0 + diffusion_scale * t;
    return std::exp(k * t) * c_ls0 + diffusion_scale * std::expm1(k * t) / k;
  }

  const double sign = contraction ? -1.0 : 1.0;
  auto checked = [&rate, contraction](double s) {
    const double v = rate.rate(s);
    if (contraction && !(v > 0.0)) throw DomainError("lsi_flow: contraction rate K must be positive");
    return v;
  };
  auto cumulative = [&](double s) { return s == 0.0 ? 0.0 : integrate(checked, 0.0, s, quad).value; };
  auto growth = [&](double s) { return std::exp(sign * cumulative(s)); };
  QuadratureConfig outer = quad;
  outer.abs_tol = std::max(quad.abs_tol, 1e-9);
  if (std::isinf(t)) return diffusion_scale * integrate_to_infinity(growth, 0.0, outer).value;
  return growth(t) * c_ls0 + diffusion_scale * integrate(growth, 0.0, t, outer).value;
}

double lsi_kl_bias(const Schedule& schedule, double kappa, const std::function<double(double)>& cls_flow,
                   const std::function<double(double)>& mdot_sq, const QuadratureConfig& quad) {
  if (!(kappa > 0.0)) throw DomainError("lsi_kl_bias: kappa must be positive");
  const double T = schedule.horizon();
  auto inv = [&](double u) {
    const double c = cls_flow(u / kappa);
    if (!(c > 0.0)) throw DomainError("lsi_kl_bias: log-Sobolev flow must be positive");
    return std::isinf(c) ? 0.0 : 1.0 / c;
  };
  QuadratureConfig inner = quad;
  inner.abs_tol = std::max(quad.abs_tol * 1e-2, 1e-13);
  auto integrand = [&](double s) {
    const double m = mdot_sq(s);
    if (m == 0.0) return 0.0;
    const double g = s >= T ? 0.0 : integrate(inv, s, T, inner).value;
    return m * std::exp(-g / kappa);
  };
  std::vector<double> points{0.0};
  for (double k : schedule.kinks()) points.push_back(k);
  points.push_back(T);
  return 0.5 * kappa * integrate_piecewise(integrand, points, quad).value;
}

BoundReport lsi_proposition_bounds(const PlateauCase& c) {
  if (!(c.kappa > 0.0 && c.kappa < 0.5)) throw PreconditionError("plateau: kappa must lie in (0, 1/2)");
  if (!(c.alpha > 0.0 && c.alpha <= 0.5)) throw PreconditionError("plateau: alpha must lie in (0, 1/2]");
  const double a = std::pow(c.kappa, c.alpha);
  if (!(a < 0.5)) throw PreconditionError("plateau: kappa^alpha must be below 1/2");
  if (!(c.radius > 0.0) || !(c.T > 0.0) || c.dim < 1)
    throw PreconditionError("plateau: need R > 0, T > 0, d >= 1");
  BoundReport r;
  r.theorem = "lsi_proposition.plateau";
  const double R2 = c.radius * c.radius;
  const double sigma2 = R2 / a;
  const double mdot = 16.0 * R2 * c.dim / (c.T * c.T * a);
  const double K = a / R2;
  const double flow = lsi_flow(sigma2, RateProfile::constant_contraction(K), 4.0, c.T);
  const double cls = 5.0 * R2 / a;
  r.assume("kappa in (0,1/2)", true, c.kappa);
  r.assume("kappa^alpha < 1/2", true, a);
  r.add_trace("sigma2", sigma2);
  r.add_trace("mdot_sq", mdot);
  r.add_trace("K", K);
  r.add_trace("cls_flow", flow);
  r.set("cls", cls);
  r.set("scaling_exponent", 2.0 * (1.0 - c.alpha));
  const double bound = 0.5 * c.kappa * c.kappa * mdot * cls;
  r.set("bound", bound);
  r.set("w2_sq", 2.0 * cls * bound);
  r.validity = ValidityWindow::range(0.0, c.T, "t");
  r.applies = true;
  return r;
}

BoundReport lsi_proposition_bounds(const ConvolvedCase& c) {
  if (!(c.kappa > 0.0 && c.kappa < 0.5)) throw PreconditionError("convolved: kappa must lie in (0, 1/2)");
  if (!(c.tau2 >= c.radius * c.radius)) throw PreconditionError("convolved: tau2 must be at least R^2");
  if (!(c.sigma2 > 0.0) || !(c.T > 0.0) || c.dim < 1 || !(c.radius >= 0.0))
    throw PreconditionError("convolved: need sigma2 > 0, T > 0, R >= 0, d >= 1");
  BoundReport r;
  r.theorem = "lsi_proposition.convolved";
  const double T = c.T, R = c.radius, tau2 = c.tau2, sigma2 = c.sigma2, kappa = c.kappa;
  const double d = c.dim;
  const double K = std::min(sigma2, tau2 - R * R) / std::max(sigma2, tau2);
  const double cls = K > 0.0 ? std::min(sigma2 + 4.0 * T, sigma2 + 4.0 / K) : sigma2 + 4.0 * T;
  const double flow = K > 0.0 ? lsi_flow(sigma2, RateProfile::constant_contraction(K), 4.0, T) : sigma2 + 4.0 * T;
  r.assume("kappa in (0,1/2)", true, kappa);
  r.assume("tau2 >= R^2", true, tau2 - R * R);
  r.add_trace("mdot_sq", 4.0 / (T * T) * (R * R + (tau2 + sigma2) * d));
  r.add_trace("cls_flow", flow);
  r.set("K", K);
  r.set("cls", cls);
  const double bound = (2.0 / (T * T)) * (R * R + (tau2 + sigma2) * d) * cls * (kappa * kappa);
  r.set("bound", bound);
  r.set("w2_sq", 2.0 * cls * bound);
  r.validity = ValidityWindow::range(0.0, T, "t");
  r.applies = true;
  return r;
}

double ou_entropy_bound(double kl0, double T) {
  if (!(kl0 >= 0.0) || !(T >= 0.0)) throw DomainError("ou_entropy_bound: need KL0 >= 0 and T >= 0");
  return std::exp(-2.0 * T) * kl0;
}

}  // namespace annealed
