#include <algorithm>
#include <cmath>
#include <numbers>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"

namespace annealed {
namespace {

double ball_prefactor(int d) {
  if (d == 1) return 4.0 / (std::numbers::pi * std::numbers::pi);
  return (d + 2.0) / (d * (d - 1.0));
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return g;
}

// r -> alpha r^{bw-1} - (d-1)/r - kappa r^{bu-1}
struct Drift {
  double alpha, bw, kappa, bu;
  int d;
  double operator()(double r) const {
    return alpha * std::pow(r, bw - 1.0) - (d - 1.0) / r - (kappa == 0.0 ? 0.0 : kappa * std::pow(r, bu - 1.0));
  }
  // Limit as r -> inf.
  double at_infinity() const {
    if (bw > bu) return kInf;
    if (bw > 1.0) return alpha > kappa ? kInf : -kInf;
    return alpha - kappa;
  }
};

// inf over r >= r0 of the drift: dense log grid, then golden section around
// the smallest grid value.
double drift_inf(const Drift& f, double r0) {
  const auto g = log_grid(r0, r0 * 1e6, 400);
  std::size_t arg = 0;
  double best = f(g[0]);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double v = f(g[i]);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  if (arg > 0 && arg + 1 < g.size()) {
    double a = g[arg - 1], b = g[arg + 1];
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
      if (f(x1) < f(x2)) b = x2; else a = x1;
    }
    best = std::min(best, f(0.5 * (a + b)));
  }
  return std::min(best, f.at_infinity());
}

BoundReport strict_variant(const LyapunovProblem& p) {
  BoundReport r;
  r.theorem = "perturbed_lyapunov.strict";
  r.validity = ValidityWindow::none();
  r.assume("D_W > 0", p.strict_dw > 0.0, p.strict_dw);
  r.assume("M_U finite", std::isfinite(p.strict_mu) && p.strict_mu >= 0.0, p.strict_mu);
  if (!r.assumptions_hold()) return r;
  const double m = p.strict_mu / std::sqrt(p.strict_dw);
  const double R = 0.5 * ((2.0 + m) + std::sqrt((2.0 + m) * (2.0 + m) + 4.0 * (p.dim - 1.0)));
  r.add_trace("R", R);
  r.add_trace("M_U/sqrt(D_W)", m);
  r.set("bound", (1.0 + std::exp(2.0 * m * R)) / p.strict_dw);
  r.validity = ValidityWindow::range(0.0, 1.0);
  r.applies = std::isfinite(r.constant("bound"));
  return r;
}

}  // namespace

std::string to_string(ConvexVariant v) {
  switch (v) {
    case ConvexVariant::none: return "none";
    case ConvexVariant::klartag: return "klartag";
    case ConvexVariant::radial: return "radial";
    default: return "strict";
  }
}

BoundReport lyapunov_poincare(double theta, double radius, double osc_on_ball, int dim,
                              bool normal_derivative_sign_ok) {
  if (!(theta > 0.0)) throw DomainError("lyapunov_poincare: theta must be positive");
  if (!(radius >= 0.0) || dim < 1 || !(osc_on_ball >= 0.0))
    throw DomainError("lyapunov_poincare: need R >= 0, d >= 1, osc >= 0");
  BoundReport r;
  r.theorem = "lyapunov_poincare";
  const double ball = ball_prefactor(dim) * radius * radius * std::exp(osc_on_ball);
  r.add_trace("prefactor", ball_prefactor(dim));
  r.set("ball_constant", ball);
  r.set("bound", normal_derivative_sign_ok ? 1.0 / theta + ball : (1.0 + ball) / theta);
  r.assume("theta > 0", true, theta);
  r.validity = ValidityWindow::range(0.0, 1.0);
  r.applies = std::isfinite(r.constant("bound"));
  return r;
}

BoundReport perturbed_lyapunov(const LyapunovProblem& p, const LyapunovSearch& search) {
  if (p.dim < 1) throw DomainError("perturbed_lyapunov: dim must be positive");
  if (p.variant == ConvexVariant::strict) return strict_variant(p);

  BoundReport r;
  r.theorem = "perturbed_lyapunov." + to_string(p.variant);
  r.validity = ValidityWindow::none();
  const auto& w = p.w;
  const auto& u = p.u;
  r.assume("alpha_W > 0", w.alpha > 0.0 && std::isfinite(w.alpha), w.alpha);
  r.assume("beta_W >= 1", w.beta >= 1.0, w.beta);
  r.assume("kappa_U finite", std::isfinite(u.kappa) && u.kappa >= 0.0, u.kappa);
  r.assume("beta_U <= beta_W", u.beta <= w.beta, u.beta);
  if (u.beta == w.beta) r.assume("alpha_W > kappa_U", w.alpha > u.kappa, w.alpha - u.kappa);
  if (p.variant != ConvexVariant::none) {
    r.assume("sigma^2(nu) finite", std::isfinite(p.base_variance) && p.base_variance > 0.0, p.base_variance);
    r.assume("ball mass available", static_cast<bool>(p.ball_mass), 0.0);
  }
  if (!r.assumptions_hold()) return r;
  if (!p.osc_u || (p.variant == ConvexVariant::none && !p.osc_w))
    throw PreconditionError("perturbed_lyapunov: oscillation functions missing");

  const Drift f{w.alpha, w.beta, u.kappa, u.beta, p.dim};
  std::vector<double> radii = search.radii;
  if (radii.empty()) {
    double hi = std::max(w.radius, 1e-3);
    int guard = 0;
    while (!(drift_inf(f, hi) > 0.0) && guard++ < 80) hi *= 2.0;
    if (!(drift_inf(f, hi) > 0.0)) {
      r.assume("c(W,U) > 0 for some R'", false, drift_inf(f, hi));
      return r;
    }
    const double lo = std::max(w.radius, hi * 0.05);
    radii = log_grid(std::max(lo, 1e-6), std::max(hi * 50.0, lo * 1.0001), search.grid_points);
  }

  double klar = 0.0;
  if (p.variant == ConvexVariant::klartag || (p.variant == ConvexVariant::radial && p.dim < 2)) {
    klar = p.c_klar * (1.0 + std::log(static_cast<double>(p.dim)));
    if (p.variant == ConvexVariant::radial) r.notes.push_back("radial factor needs d >= 2; Klartag constant used");
  } else if (p.variant == ConvexVariant::radial) {
    klar = 2.0;
  }

  double best = kInf, best_gamma = 0.0, best_r = 0.0, best_c = 0.0, best_ball = 0.0;
  for (double rp : radii) {
    if (rp < w.radius) continue;
    const double c0 = drift_inf(f, rp);
    if (!(c0 > 0.0)) continue;
    double ball;
    if (p.variant == ConvexVariant::none) {
      ball = ball_prefactor(p.dim) * rp * rp * std::exp(p.osc_w(rp) + p.osc_u(rp));
    } else {
      const double mass = p.ball_mass(rp);
      if (!(mass > 0.0)) continue;
      ball = klar * p.base_variance * std::exp(p.osc_u(rp)) / mass;
    }
    std::vector<double> gammas = search.gammas;
    if (gammas.empty()) {
      gammas = log_grid(c0 * 1e-3, c0 * (1.0 - 1e-3), search.grid_points);
      gammas.push_back(0.5 * c0);
    }
    for (double g : gammas) {
      const double c = c0 - g;
      if (!(g > 0.0) || !(c > 0.0)) continue;
      const double total = 1.0 / (g * c) + ball;
      if (total < best) {
        best = total;
        best_gamma = g;
        best_r = rp;
        best_c = c;
        best_ball = ball;
      }
    }
  }
  r.assume("c(W,U) > 0 for some R'", std::isfinite(best), best_c);
  if (!std::isfinite(best)) return r;
  r.add_trace("gamma", best_gamma);
  r.add_trace("R_prime", best_r);
  r.add_trace("c", best_c);
  r.add_trace("theta", best_gamma * best_c);
  r.set("ball_constant", best_ball);
  r.set("bound", best);
  r.validity = ValidityWindow::range(0.0, 1.0);
  r.applies = true;
  return r;
}

LyapunovProblem conditional_problem(const LyapunovProblem& p, double lambda, double grad_sup_u) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("conditional_rescale: lambda must lie in (0,1)");
  const double s = 1.0 - lambda;
  const double ss = std::sqrt(s);
  LyapunovProblem q = p;
  q.w.alpha = p.w.alpha / std::pow(s, 0.5 * p.w.beta);
  q.w.radius = p.w.radius * ss;
  q.u.kappa = grad_sup_u / std::sqrt(lambda);
  q.u.beta = 1.0;
  q.base_variance = s * p.base_variance;
  if (p.osc_w) {
    auto osc = p.osc_w;
    q.osc_w = [osc, ss](double r) { return osc(r / ss); };
  }
  const double k = q.u.kappa;
  q.osc_u = [k](double r) { return 2.0 * k * r; };
  if (p.ball_mass) {
    auto mass = p.ball_mass;
    q.ball_mass = [mass, ss](double r) { return mass(r / ss); };
  }
  q.strict_dw = p.strict_dw / s;
  q.strict_mu = grad_sup_u / std::sqrt(lambda);
  return q;
}

BoundReport conditional_rescale(const LyapunovProblem& p, double lambda, double grad_sup_u,
                                const LyapunovSearch& search) {
  BoundReport r = perturbed_lyapunov(conditional_problem(p, lambda, grad_sup_u), search);
  r.theorem = "conditional_rescale." + r.theorem;
  return r;
}

std::optional<LyapunovProblem> lyapunov_problem(const Potential& base, const Potential& target,
                                                ConvexVariant variant) {
  const SmoothnessProfile pw = closed_form_profile(base);
  const SmoothnessProfile pu = closed_form_profile(target);
  LyapunovProblem p;
  p.dim = base.dim();
  p.variant = variant;
  if (variant == ConvexVariant::strict) {
    if (!(pw.hess_lower > 0.0)) return std::nullopt;
    p.strict_dw = pw.hess_lower;
    p.strict_mu = pu.grad_sup;
    return p;
  }
  if (!pw.quasiconvex) return std::nullopt;
  if ((variant == ConvexVariant::klartag || variant == ConvexVariant::radial) && !(pw.hess_lower >= 0.0))
    return std::nullopt;
  if (variant == ConvexVariant::radial && !base.radial()) return std::nullopt;
  p.w = *pw.quasiconvex;
  p.u = pu.drift_growth.value_or(DriftGrowth{pu.grad_sup, 1.0});
  p.osc_w = [base](double r) { return oscillation_on_ball(base, r); };
  if (target.radial()) {
    p.osc_u = [target](double r) { return oscillation_on_ball(target, r); };
  } else {
    const double m = pu.grad_sup;
    p.osc_u = [m](double r) { return 2.0 * m * r; };
  }
  p.ball_mass = [base](double r) { return ball_mass(base, r); };
  try {
    const MomentSummary mom = moments(base);
    p.base_variance = Eigen::SelfAdjointEigenSolver<Matrix>(mom.covariance).eigenvalues().maxCoeff();
  } catch (const Error&) {
    p.base_variance = kInf;
  }
  return p;
}

LinearGrowth quantitative_convex_linear_growth(double M, double w0, int dim) {
  if (!(M > 0.0) || dim < 1) throw DomainError("quantitative_convex_linear_growth: need M > 0, d >= 1");
  const double d = dim;
  LinearGrowth g;
  g.radius = d * std::tgamma(0.5 * (d + 1.0)) * std::exp(std::abs(w0) + M) / std::pow(std::numbers::pi, 0.5 * (d - 1.0));
  g.alpha = M / (1.0 + g.radius);
  return g;
}

}  // namespace annealed
