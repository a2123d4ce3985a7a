#include "annealed/poincare_1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "annealed/errors.hpp"

namespace annealed {
namespace {

constexpr double kTruncationLevel = 1e-10;

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1
};

// Number of eigenvalues strictly below x (Sturm sequence via LDL^T pivots).
int count_below(const Tridiagonal& t, double x) {
  int count = 0;
  double q = t.diag[0] - x;
  const double tiny = std::numeric_limits<double>::min() * 1e3;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < t.diag.size(); ++i) {
    if (std::abs(q) < tiny) q = -tiny;
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

// Solves (T - shift I) y = rhs with the Thomas algorithm.
std::vector<double> solve_shifted(const Tridiagonal& t, double shift, std::vector<double> rhs) {
  const std::size_t n = t.diag.size();
  std::vector<double> c(n, 0.0);
  double denom = t.diag[0] - shift;
  const double tiny = 1e-300;
  if (std::abs(denom) < tiny) denom = tiny;
  c[0] = n > 1 ? t.off[0] / denom : 0.0;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = t.diag[i] - shift - t.off[i - 1] * c[i - 1];
    if (std::abs(denom) < tiny) denom = tiny;
    c[i] = i + 1 < n ? t.off[i] / denom : 0.0;
    rhs[i] = (rhs[i] - t.off[i - 1] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace

GridMeasure1D::GridMeasure1D(LogDensity1D log_density, double a, double b, int n)
    : logp_(std::move(log_density)), a_(a), b_(b), n_(n) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("grid measure: need finite a < b");
  if (n < 16) throw DomainError("grid measure: need at least 16 nodes");
}

GridMeasure1D GridMeasure1D::with_auto_interval(LogDensity1D log_density, int n, double bracket_lo,
                                                double bracket_hi) {
  constexpr int kScan = 20001;
  double lo = bracket_lo, hi = bracket_hi;
  double mean = 0.0, sd = 0.0, peak = -std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> xs(kScan), lv(kScan);
    const double dx = (hi - lo) / (kScan - 1);
    peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
      xs[i] = lo + i * dx;
      lv[i] = log_density(xs[i]);
      peak = std::max(peak, lv[i]);
    }
    if (!std::isfinite(peak)) throw NumericalError("grid measure: log-density not finite on bracket");
    double w0 = 0.0, w1 = 0.0, w2 = 0.0;
    int first = kScan, last = -1;
    for (int i = 0; i < kScan; ++i) {
      double w = std::exp(lv[i] - peak);
      w0 += w;
      w1 += w * xs[i];
      w2 += w * xs[i] * xs[i];
      if (lv[i] - peak > -40.0) {
        first = std::min(first, i);
        last = i;
      }
    }
    mean = w1 / w0;
    sd = std::sqrt(std::max(w2 / w0 - mean * mean, 0.0));
    // Zoom onto the bulk for a second, finer pass.
    double span = std::max(xs[last] - xs[first], 10.0 * dx);
    lo = std::max(bracket_lo, xs[first] - 0.5 * span);
    hi = std::min(bracket_hi, xs[last] + 0.5 * span);
  }
  if (!(sd > 0.0)) sd = (hi - lo) / 100.0;
  double a = std::max(bracket_lo, mean - 10.0 * sd);
  double b = std::min(bracket_hi, mean + 10.0 * sd);
  const double cut = peak - 150.0;
  const double step = 0.5 * sd;
  while (a > bracket_lo && log_density(a) > cut) a = std::max(bracket_lo, a - step);
  while (b < bracket_hi && log_density(b) > cut) b = std::min(bracket_hi, b + step);
  return GridMeasure1D(std::move(log_density), a, b, n);
}

std::vector<double> GridMeasure1D::nodes() const {
  std::vector<double> x(n_);
  const double dx = (b_ - a_) / (n_ - 1);
  for (int i = 0; i < n_; ++i) x[i] = a_ + i * dx;
  x[n_ - 1] = b_;
  return x;
}

std::vector<double> GridMeasure1D::weights() const {
  auto x = nodes();
  std::vector<double> lv(n_);
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i) {
    lv[i] = logp_(x[i]);
    peak = std::max(peak, lv[i]);
  }
  std::vector<double> w(n_);
  double total = 0.0;
  for (int i = 0; i < n_; ++i) {
    w[i] = std::exp(lv[i] - peak) * ((i == 0 || i == n_ - 1) ? 0.5 : 1.0);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

double GridMeasure1D::boundary_weight() const {
  auto x = nodes();
  double peak = -std::numeric_limits<double>::infinity();
  for (double xi : x) peak = std::max(peak, logp_(xi));
  return std::exp(std::max(logp_(a_), logp_(b_)) - peak);
}

SpectralGap spectral_gap(const GridMeasure1D& m) {
  const int n = m.size();
  const auto x = m.nodes();
  const double dx = (m.hi() - m.lo()) / (n - 1);
  std::vector<double> v(n), vmid(n - 1);
  for (int i = 0; i < n; ++i) v[i] = -m.log_density()(x[i]);
  for (int i = 0; i + 1 < n; ++i) vmid[i] = -m.log_density()(0.5 * (x[i] + x[i + 1]));
  for (double val : v)
    if (!std::isfinite(val)) throw NumericalError("poincare_1d: non-finite potential on grid");

  // Dirichlet form sum_i c_{i+1/2} (g_{i+1}-g_i)^2 with c = e^{-V_mid}/dx and
  // lumped mass m_i = dx e^{-V_i} (halved at the ends). Symmetric scaling
  // M^{-1/2} K M^{-1/2} is formed in log space to avoid underflow.
  const double inv_dx2 = 1.0 / (dx * dx);
  auto mass_log_factor = [&](int i) { return (i == 0 || i == n - 1) ? std::log(0.5) : 0.0; };
  Tridiagonal t{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
  for (int i = 0; i + 1 < n; ++i) {
    double li = v[i] - mass_log_factor(i);
    double lj = v[i + 1] - mass_log_factor(i + 1);
    t.diag[i] += std::exp(li - vmid[i]) * inv_dx2;
    t.diag[i + 1] += std::exp(lj - vmid[i]) * inv_dx2;
    t.off[i] = -std::exp(0.5 * (li + lj) - vmid[i]) * inv_dx2;
  }

  double lower = 0.0, upper = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    upper = std::max(upper, t.diag[i] + r);
    lower = std::min(lower, t.diag[i] - r);
  }
  // Second smallest eigenvalue: smallest x with at least two eigenvalues below.
  double lo = lower, hi = upper;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (count_below(t, mid) >= 2)
      hi = mid;
    else
      lo = mid;
  }
  const double mu = 0.5 * (lo + hi);
  if (!(mu > 0.0) || !std::isfinite(mu)) throw NumericalError("poincare_1d: spectral gap not positive");

  // Inverse iteration for the eigenvector.
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = x[i] - 0.5 * (m.lo() + m.hi()) + 1e-3 * std::sin(3.0 * i);
  const double shift = mu * (1.0 - 1e-10);
  for (int it = 0; it < 4; ++it) {
    y = solve_shifted(t, shift, y);
    double norm = 0.0;
    for (double yi : y) norm += yi * yi;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("poincare_1d: inverse iteration failed");
    for (double& yi : y) yi /= norm;
  }
  // Back to g = M^{-1/2} y, normalized in L2 of the normalized measure.
  auto w = m.weights();
  std::vector<double> g(n);
  double peak_v = *std::min_element(v.begin(), v.end());
  double mass_total = 0.0;
  for (int i = 0; i < n; ++i) mass_total += std::exp(-(v[i] - peak_v) + mass_log_factor(i));
  for (int i = 0; i < n; ++i) {
    double mi = std::exp(-(v[i] - peak_v) + mass_log_factor(i)) / mass_total;
    g[i] = mi > 0.0 ? y[i] / std::sqrt(mi) : 0.0;
  }
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) norm2 += w[i] * g[i] * g[i];
  for (double& gi : g) gi /= std::sqrt(norm2);
  return {1.0 / mu, x, g};
}

PoincareResult poincare_1d(const GridMeasure1D& m) {
  PoincareResult r;
  SpectralGap coarse = spectral_gap(m);
  r.fine = spectral_gap(m.refined());
  r.c_p_coarse = coarse.c_p;
  r.c_p = r.fine.c_p;
  r.refinement = std::abs(coarse.c_p - r.fine.c_p) / r.fine.c_p;
  r.refined_ok = r.refinement < 1e-2;
  r.boundary_weight = m.boundary_weight();
  r.truncated = r.boundary_weight > kTruncationLevel;
  return r;
}

}  // namespace annealed
