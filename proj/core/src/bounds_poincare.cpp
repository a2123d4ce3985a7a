#include <algorithm>
#include <cmath>
#include <numbers>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"

namespace annealed {
namespace {

const double kSqrt2dPi = std::sqrt(2.0 / std::numbers::pi);

bool inside(double lambda) { return lambda > 0.0 && lambda < 1.0; }

// lambda window where D_W/(1-l) + D_U/l > 0.
ValidityWindow convexity_window(double dw, double du) {
  if (dw >= 0.0 && du >= 0.0) {
    if (dw == 0.0 && du == 0.0) return ValidityWindow::none();
    return ValidityWindow::range(0.0, 1.0);
  }
  if (dw > 0.0) return ValidityWindow::range(-du / (dw - du), 1.0);  // du < 0
  if (du > 0.0) return ValidityWindow::range(0.0, du / (du - dw));   // dw < 0
  return ValidityWindow::none();
}

void mutual_convexity(BoundReport& r, const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda) {
  const double dw = W.hess_lower_at_infinity, du = U.hess_lower_at_infinity;
  const double R = std::max(W.convexity_radius, U.convexity_radius);
  r.assume("D_W^R finite", std::isfinite(dw), dw);
  r.assume("D_U^R finite", std::isfinite(du), du);
  double exponent = 0.0;
  if (R > 0.0) {
    const double lw = W.grad_lipschitz, lu = U.grad_lipschitz;
    r.assume("L_W finite", std::isfinite(lw), lw);
    r.assume("L_U finite", std::isfinite(lu), lu);
    exponent = 16.0 * R * R * (lw + std::abs(dw) + lu + std::abs(du));
  }
  r.add_trace("R", R);
  r.add_trace("oscillation", exponent);
  if (!r.assumptions_hold()) return;
  r.validity = convexity_window(dw, du);
  const double c = (dw == 0.0 ? 0.0 : dw / (1.0 - lambda)) + (du == 0.0 ? 0.0 : du / lambda);
  r.add_trace("c_R", c);
  r.assume("c_R(t) > 0", c > 0.0, c);
  if (c > 0.0) {
    r.set("bound", std::exp(exponent) / c);
    r.applies = std::isfinite(r.constant("bound"));
  }
}

void miclo(BoundReport& r, const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda, int d) {
  const double dw = W.hess_lower, mu = U.grad_sup;
  r.assume("D_W > 0", dw > 0.0, dw);
  r.assume("M_U finite", std::isfinite(mu), mu);
  r.notes.push_back("the exponent of this bound is suspected to contain a typo; the value is reported as computed");
  if (!r.assumptions_hold()) return;
  r.validity = ValidityWindow::range(mu == 0.0 ? 0.0 : std::nextafter(0.0, 1.0), 1.0);
  const double s = 1.0 - lambda;
  const double expo = mu == 0.0 ? 0.0 : 4.0 * std::sqrt(static_cast<double>(d)) * kSqrt2dPi * mu * mu * s / (lambda * dw);
  r.add_trace("exponent", expo);
  r.set("bound", 2.0 * s / dw * std::exp(expo));
  r.applies = r.validity.contains(lambda) && std::isfinite(r.constant("bound"));
}

void reflection(BoundReport& r, const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda) {
  const double dw = W.hess_lower, mu = U.grad_sup;
  r.assume("D_W > 0", dw > 0.0, dw);
  r.assume("M_U finite", std::isfinite(mu), mu);
  if (!r.assumptions_hold()) return;
  r.validity = ValidityWindow::range(mu == 0.0 ? 0.0 : std::nextafter(0.0, 1.0), 1.0);
  const double s = 1.0 - lambda;
  const double drift = mu == 0.0 ? 0.0 : mu * s / (std::sqrt(lambda) * dw);
  const double root = drift + std::sqrt(2.0 * s / dw);
  const double expo = mu == 0.0 ? 0.0 : mu * mu * s / (2.0 * lambda * dw);
  r.add_trace("exponent", expo);
  r.set("bound", 2.0 * root * root * std::exp(expo));
  r.applies = r.validity.contains(lambda) && std::isfinite(r.constant("bound"));
}

void convex_infinity(BoundReport& r, const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda,
                     int d) {
  const double dr = W.hess_lower_at_infinity, mu = U.grad_sup, lw = W.grad_lipschitz;
  const double R = W.convexity_radius;
  r.assume("D_W^R > 0", dr > 0.0, dr);
  r.assume("M_U finite", std::isfinite(mu), mu);
  if (R > 0.0) r.assume("L_W finite", std::isfinite(lw), lw);
  if (!r.assumptions_hold()) return;
  r.validity = ValidityWindow::range(mu == 0.0 ? 0.0 : std::nextafter(0.0, 1.0), 1.0);
  const double s = 1.0 - lambda;
  const double pert = R > 0.0 ? std::exp(16.0 * R * R * lw) : 1.0;
  const double e1 = mu == 0.0 ? 0.0 : 16.0 * std::sqrt(static_cast<double>(d)) * kSqrt2dPi * mu * mu * s / (lambda * dr);
  const double v1 = 4.0 * s / dr * std::exp(e1) * pert;
  const double root = (mu == 0.0 ? 0.0 : mu * s / (std::sqrt(lambda) * dr)) + std::sqrt(s / dr);
  const double e2 = mu == 0.0 ? 0.0 : mu * mu * s / (lambda * dr);
  const double v2 = 8.0 * root * root * std::exp(e2) * pert;
  r.set("variant_1", v1);
  r.set("variant_2", v2);
  r.set("bound", std::min(v1, v2));
  r.add_trace("R", R);
  r.applies = r.validity.contains(lambda) && std::isfinite(r.constant("bound"));
}

double direct_bound(double lambda, double cp, double mu, double eps, double* s_out) {
  const double s = mu == 0.0 ? 0.0 : (1.0 + eps) * (1.0 - lambda) * cp * mu * mu / (4.0 * lambda);
  if (s_out) *s_out = s;
  if (!(s < 1.0)) return kInf;
  return (1.0 + 1.0 / eps) / (1.0 - s) * (1.0 - lambda) * cp;
}

double lambda_min(double cp, double mu, double eps) {
  const double a = (1.0 + eps) * cp * mu * mu;
  return a / (4.0 + a);
}

void direct(BoundReport& r, const SmoothnessProfile& U, double lambda, const ConditionalPoincareParams& p) {
  if (p.epsilon && !(*p.epsilon > 0.0)) throw DomainError("conditional_poincare: epsilon must be positive");
  const double mu = U.grad_sup;
  const double cp = p.base_poincare.value_or(kInf);
  r.assume("C_P(nu) finite", std::isfinite(cp), cp);
  r.assume("M_U finite", std::isfinite(mu), mu);
  if (!r.assumptions_hold()) return;
  double eps = 0.0, best = kInf;
  if (p.epsilon) {
    eps = *p.epsilon;
    best = direct_bound(lambda, cp, mu, eps, nullptr);
  } else {
    // log grid 1e-3 .. 1e3
    const int n = 601;
    for (int i = 0; i < n; ++i) {
      const double e = std::pow(10.0, -3.0 + 6.0 * i / (n - 1));
      const double v = direct_bound(lambda, cp, mu, e, nullptr);
      if (v < best) {
        best = v;
        eps = e;
      }
    }
    if (!std::isfinite(best)) eps = 1e-3;
  }
  double s = 0.0;
  direct_bound(lambda, cp, mu, eps, &s);
  const double lmin = lambda_min(cp, mu, p.epsilon ? eps : 0.0);
  r.add_trace("epsilon", eps);
  r.add_trace("s", s);
  r.set("lambda_min", lmin);
  r.validity = ValidityWindow::range(lmin, 1.0);
  r.assume("s < 1", s < 1.0, s);
  if (s < 1.0) {
    r.set("bound", best);
    r.applies = std::isfinite(best);
  }
}

}  // namespace

std::string to_string(PoincareMethod m) {
  switch (m) {
    case PoincareMethod::mutual_convexity: return "mutual_convexity";
    case PoincareMethod::miclo: return "miclo";
    case PoincareMethod::reflection: return "reflection";
    case PoincareMethod::convex_infinity: return "convex_infinity";
    default: return "direct";
  }
}

BoundReport conditional_poincare(PoincareMethod method, const SmoothnessProfile& W, const SmoothnessProfile& U,
                                 double lambda, const ConditionalPoincareParams& params) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("conditional_poincare: lambda outside [0,1]");
  if (params.dim < 1) throw DomainError("conditional_poincare: dim must be positive");
  BoundReport r;
  r.theorem = "conditional_poincare." + to_string(method);
  r.validity = ValidityWindow::none();
  if (!inside(lambda)) {
    r.notes.push_back("conditional law is degenerate at lambda in {0, 1}");
  }
  switch (method) {
    case PoincareMethod::mutual_convexity: mutual_convexity(r, W, U, lambda); break;
    case PoincareMethod::miclo: miclo(r, W, U, lambda, params.dim); break;
    case PoincareMethod::reflection: reflection(r, W, U, lambda); break;
    case PoincareMethod::convex_infinity: convex_infinity(r, W, U, lambda, params.dim); break;
    case PoincareMethod::direct: direct(r, U, lambda, params); break;
  }
  if (!inside(lambda)) r.applies = false;
  if (r.applies && !r.validity.contains(lambda)) r.applies = false;
  return r;
}

}  // namespace annealed
