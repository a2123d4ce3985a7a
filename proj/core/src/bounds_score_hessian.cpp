#include <algorithm>
#include <cmath>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"

namespace annealed {
namespace {

// c / s with 0/0 = 0 and c/0 = inf for c > 0.
double over(double c, double s) {
  if (c == 0.0) return 0.0;
  if (s == 0.0) return c > 0 ? kInf : -kInf;
  return c / s;
}

void check_lambda(double lambda, const char* op) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError(std::string(op) + ": lambda outside [0,1]");
}

}  // namespace

BoundReport score_sup_bound(const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda) {
  check_lambda(lambda, "score_sup_bound");
  const double mw = W.grad_sup, mu = U.grad_sup;
  if (!std::isfinite(mw) && !std::isfinite(mu))
    throw NoApplicableBound("score_sup_bound: neither M_W nor M_U is finite");
  BoundReport r;
  r.theorem = "score_sup_bound";
  r.assume("M_W finite", std::isfinite(mw), mw);
  r.assume("M_U finite", std::isfinite(mu), mu);
  const double bw = std::isfinite(mw) ? over(mw, std::sqrt(1.0 - lambda)) : kInf;
  const double bu = std::isfinite(mu) ? over(mu, std::sqrt(lambda)) : kInf;
  r.add_trace("b_W", bw);
  r.add_trace("b_U", bu);
  const double b = std::min(bw, bu);
  r.set("bound", b);
  if (std::isfinite(mw) && std::isfinite(mu)) {
    // lambda_{1/2} = 1/2 for the two-sided constant.
    r.set("uniform", std::sqrt(2.0) * std::max(mw, mu));
    r.validity = ValidityWindow::range(0.0, 1.0);
  } else if (std::isfinite(mw)) {
    r.validity = ValidityWindow::range(0.0, mw == 0.0 ? 1.0 : std::nextafter(1.0, 0.0));
  } else {
    r.validity = ValidityWindow::range(mu == 0.0 ? 0.0 : std::nextafter(0.0, 1.0), 1.0);
  }
  r.applies = std::isfinite(b);
  return r;
}

HessianBand hessian_band(const SmoothnessProfile& W, const SmoothnessProfile& U, double lambda,
                         std::optional<double> poincare, BandStructure structure,
                         const std::vector<double>& product_variances) {
  check_lambda(lambda, "hessian_band");
  const double cw = W.hess_upper;
  if (!std::isfinite(cw)) throw PreconditionError("hessian_band: missing C_W");
  if (poincare && !(*poincare >= 0.0)) throw DomainError("hessian_band: C_P must be nonnegative");
  const double s = 1.0 - lambda;
  const int d = W.dim;
  HessianBand band;
  band.lower = -over(cw, s);

  auto candidate = [&band](double v, const char* name) {
    if (v < band.upper) {
      band.upper = v;
      band.upper_branch = name;
    }
  };
  if (std::isfinite(W.grad_sup)) candidate(over(cw + W.grad_sup * W.grad_sup, s), "bounded_gradient");

  const double cu = U.hess_upper;
  if (std::isfinite(cu)) {
    band.lower = std::max(band.lower, -over(cu, lambda));
    if (std::isfinite(U.grad_sup)) candidate(over(cu + U.grad_sup * U.grad_sup, lambda), "bounded_gradient_target");
  }

  if (poincare) {
    const double cp = *poincare;
    switch (structure) {
      case BandStructure::generic:
        candidate(over(cw, s) * (1.0 + over(d * cw * cp, s)), "poincare");
        break;
      case BandStructure::strictly_convex:
        if (!(W.hess_lower > 0.0)) throw PreconditionError("hessian_band: strictly_convex needs D_W > 0");
        candidate(-over(W.hess_lower, s) + over(d * cw * cw * cp, s * s), "poincare_strictly_convex");
        break;
      case BandStructure::gaussian: {
        if (!(cw > 0.0)) throw PreconditionError("hessian_band: gaussian needs C_W > 0");
        const double sig2 = 1.0 / cw;
        candidate(over(1.0, sig2 * s) * (-1.0 + over(cp, sig2 * s)), "poincare_gaussian");
        break;
      }
      case BandStructure::product: {
        if (product_variances.empty())
          throw PreconditionError("hessian_band: product needs the coordinate variances");
        const auto [mn, mx] = std::minmax_element(product_variances.begin(), product_variances.end());
        candidate(-over(1.0, *mx * s) + over(cp, (*mn) * (*mn) * s * s), "poincare_product");
        break;
      }
    }
    if (std::isfinite(cu)) {
      const double c = 2.0;
      const double cm = std::max(cw, cu);
      candidate(c * cm * (1.0 + c * d * cm * cp), "poincare_two_sided");
    }
  } else if (structure != BandStructure::generic) {
    throw PreconditionError("hessian_band: refined structure needs C_P");
  }
  if (!std::isfinite(band.upper) && band.upper_branch.empty())
    throw PreconditionError("hessian_band: upper bound needs M_W or C_P");
  band.lipschitz = std::sqrt(static_cast<double>(d)) * std::max(std::abs(band.lower), std::abs(band.upper));
  return band;
}

HessianBand gaussian_compact_band(double sigma2, double tau2, double radius, double lambda, int dim) {
  check_lambda(lambda, "gaussian_compact_band");
  if (!(sigma2 > 0.0) || !(tau2 >= 0.0) || !(radius >= 0.0) || dim < 1)
    throw DomainError("gaussian_compact_band: need sigma2 > 0, tau2 >= 0, R >= 0");
  const double a2 = sigma2 * (1.0 - lambda) + tau2 * lambda;
  if (!(a2 > 0.0)) throw DomainError("gaussian_compact_band: alpha_t^2 vanishes at lambda = 1 with tau2 = 0");
  HessianBand band;
  band.lower = -1.0 / a2;
  band.upper = radius == 0.0 ? band.lower : -(a2 - lambda * radius * radius) / (a2 * a2);
  band.upper_branch = "gaussian_compact";
  band.lipschitz = std::sqrt(static_cast<double>(dim)) * std::max(std::abs(band.lower), std::abs(band.upper));
  return band;
}

}  // namespace annealed
