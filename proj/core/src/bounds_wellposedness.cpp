#include <algorithm>
#include <cmath>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"

namespace annealed {
namespace {

// Gaussian base with a Gaussian, uniform-ball or convolved-ball target has an
// exact band; everything else goes through the profile estimates.
std::optional<HessianBand> structural_band(const InterpolationLaw& law, double lambda) {
  if (!law.base().is<GaussianFamily>()) return std::nullopt;
  const double s2 = law.base().as<GaussianFamily>().variance;
  const Potential& t = law.target();
  const int d = law.dim();
  if (t.is<GaussianFamily>()) return gaussian_compact_band(s2, t.as<GaussianFamily>().variance, 0.0, lambda, d);
  if (t.is<UniformBallFamily>()) return gaussian_compact_band(s2, 0.0, t.as<UniformBallFamily>().radius, lambda, d);
  if (t.is<CompactGaussianConvolutionFamily>()) {
    const auto& c = t.as<CompactGaussianConvolutionFamily>();
    return gaussian_compact_band(s2, c.smoothing_variance, c.radius, lambda, d);
  }
  return std::nullopt;
}

}  // namespace

double kl_bias_bound(double action_bound, double kappa) { return kappa / 4.0 * action_bound; }

double bl_bias_bound(double lambdaT, double m_pi, double m_nu, double kappa, double action_bound) {
  const double endpoint = lambdaT >= 1.0 ? 0.0 : (1.0 - std::sqrt(lambdaT)) * m_pi + std::sqrt(1.0 - lambdaT) * m_nu;
  return endpoint + std::sqrt(kappa / 2.0) * std::sqrt(action_bound);
}

BoundReport wellposedness_report(const InterpolationLaw& law, double kappa, const std::vector<double>& eps_grid,
                                 const QuadratureConfig& quad) {
  if (!(kappa > 0.0)) throw DomainError("wellposedness_report: kappa must be positive");
  BoundReport r;
  r.theorem = "wellposedness";
  const Schedule& sch = law.schedule();
  const double T = sch.horizon();
  const SmoothnessProfile W = known_profile(law.base());
  const SmoothnessProfile U = known_profile(law.target());
  r.notes.push_back("KL bias uses the kappa/4 convention; kl_bias_kappa_half is the kappa/2 variant");

  bool hess_ok = !eps_grid.empty(), score_ok = !eps_grid.empty();
  constexpr int kTimes = 257;
  for (double eps : eps_grid) {
    if (!(eps > 0.0 && eps <= T)) throw DomainError("wellposedness_report: eps must lie in (0, T]");
    double a = 0.0, b = 0.0;
    for (int i = 0; i < kTimes; ++i) {
      const double t = (T - eps) * i / (kTimes - 1);
      const double lambda = sch.lambda(t);
      try {
        auto band = structural_band(law, lambda);
        if (!band) band = hessian_band(W, U, lambda);
        a = std::max({a, std::abs(band->lower), std::abs(band->upper)});
      } catch (const Error&) {
        a = kInf;
      }
      try {
        b = std::max(b, score_sup_bound(W, U, lambda).constant("bound"));
      } catch (const Error&) {
        b = kInf;
      }
    }
    r.set("a[" + format_real(eps) + "]", a);
    r.set("b[" + format_real(eps) + "]", b);
    hess_ok = hess_ok && std::isfinite(a);
    score_ok = score_ok && std::isfinite(b);
  }
  r.assume("(1)(i) Hessian bounded on [0, T-eps]", hess_ok, hess_ok ? 1.0 : 0.0);
  r.assume("(1)(ii) score bounded on [0, T-eps]", score_ok, score_ok ? 1.0 : 0.0);

  double action = kInf;
  MomentSummary mp, mn;
  bool moments_ok = true;
  try {
    mp = moments(law.target());
    mn = moments(law.base());
    const ActionSummary act = action_integrals(sch, mp, mn, quad);
    action = act.action_bound;
    r.add_trace("A0", act.A0);
    r.add_trace("A1", act.A1);
    r.add_trace("V_pi", act.V_pi);
    r.add_trace("V_nu", act.V_nu);
    r.add_trace("centered", act.centered ? 1.0 : 0.0);
  } catch (const Error& e) {
    moments_ok = false;
    r.notes.push_back(std::string("action: ") + e.what());
  }
  r.assume("(2) finite action", std::isfinite(action), action);
  r.set("action_bound", action);

  const bool assumption1 = hess_ok || score_ok;
  // The Hessian and score flags carry (1) separately; applicability needs one of them.
  r.applies = assumption1 && std::isfinite(action);
  if (!moments_ok) return r;

  const double lT = sch.lambdaT(), l0 = sch.lambda0();
  const double kl = kl_bias_bound(action, kappa);
  r.set("kl_bias", kl);
  r.set("kl_bias_kappa_half", kappa / 2.0 * action);
  r.set("tv_bound", std::sqrt(2.0 * kl));
  r.set("bl_bound", bl_bias_bound(lT, mp.mean_abs, mn.mean_abs, kappa, action));
  const bool centered = law.target().centered() || law.base().centered();
  const double w2f = centered ? 1.0 : 2.0;
  r.set("w1_target_endpoint", (1.0 - std::sqrt(lT)) * mp.mean_abs + std::sqrt(1.0 - lT) * mn.mean_abs);
  r.set("w2_sq_target_endpoint",
        w2f * ((1.0 - std::sqrt(lT)) * (1.0 - std::sqrt(lT)) * mp.second_moment + (1.0 - lT) * mn.second_moment));
  r.set("w1_base_endpoint", std::sqrt(l0) * mp.mean_abs + (1.0 - std::sqrt(1.0 - l0)) * mn.mean_abs);
  r.set("w2_sq_base_endpoint",
        w2f * (l0 * mp.second_moment + (1.0 - std::sqrt(1.0 - l0)) * (1.0 - std::sqrt(1.0 - l0)) * mn.second_moment));
  r.set("bound", kl);
  r.validity = r.applies ? ValidityWindow::range(0.0, T, "t") : ValidityWindow::none("t");
  return r;
}

}  // namespace annealed
