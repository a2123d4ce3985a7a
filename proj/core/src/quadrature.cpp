#include "annealed/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <string>

#include "annealed/errors.hpp"

namespace annealed {
namespace {

struct Panel {
  double a, b;
  double fa, fl, fm, fr, fb;
  double value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double eval_checked(const ScalarFn& f, double x) {
  double v = f(x);
  if (!std::isfinite(v)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "quadrature: non-finite integrand at x=%.17g", x);
    throw NumericalError(buf);
  }
  return v;
}

Panel make_panel(const ScalarFn& f, double a, double b, double fa, double fm, double fb) {
  Panel p{a, b, fa, 0.0, fm, 0.0, fb, 0.0, 0.0};
  double m = 0.5 * (a + b);
  p.fl = eval_checked(f, 0.5 * (a + m));
  p.fr = eval_checked(f, 0.5 * (m + b));
  double h = b - a;
  double coarse = h / 6.0 * (fa + 4.0 * fm + fb);
  double fine = h / 12.0 * (fa + 4.0 * p.fl + 2.0 * fm + 4.0 * p.fr + fb);
  p.value = fine + (fine - coarse) / 15.0;
  p.error = std::abs(fine - coarse) / 15.0;
  return p;
}

}  // namespace

QuadratureResult integrate_piecewise(const ScalarFn& f, std::vector<double> points,
                                     const QuadratureConfig& cfg) {
  if (points.size() < 2) throw DomainError("quadrature: need at least two points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] >= points[i - 1]) || !std::isfinite(points[i]) || !std::isfinite(points[0]))
      throw DomainError("quadrature: breakpoints must be finite and nondecreasing");
  }
  std::priority_queue<Panel> heap;
  constexpr int kInitial = 4;
  for (std::size_t i = 1; i < points.size(); ++i) {
    double a = points[i - 1], b = points[i];
    if (a == b) continue;
    double h = (b - a) / kInitial;
    double fprev = eval_checked(f, a);
    for (int k = 0; k < kInitial; ++k) {
      double lo = a + k * h;
      double hi = (k + 1 == kInitial) ? b : a + (k + 1) * h;
      double fm = eval_checked(f, 0.5 * (lo + hi));
      double fhi = eval_checked(f, hi);
      heap.push(make_panel(f, lo, hi, fprev, fm, fhi));
      fprev = fhi;
    }
  }
  auto totals = [&heap] {
    // Deterministic order: copy and drain.
    auto copy = heap;
    double v = 0.0, e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };
  double err_sum = 0.0;
  double val_sum = 0.0;
  {
    auto [v, e] = totals();
    val_sum = v;
    err_sum = e;
  }
  int refinements = 0;
  while (!heap.empty()) {
    double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(val_sum));
    if (err_sum <= tol) break;
    if (static_cast<int>(heap.size()) >= cfg.max_panels) {
      const Panel& worst = heap.top();
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "quadrature: panel cap %d exceeded; error %.3g > tol %.3g, worst panel [%.17g, %.17g]",
                    cfg.max_panels, err_sum, tol, worst.a, worst.b);
      throw NumericalError(buf);
    }
    Panel p = heap.top();
    heap.pop();
    double m = 0.5 * (p.a + p.b);
    Panel left = make_panel(f, p.a, m, p.fa, p.fl, p.fm);
    Panel right = make_panel(f, m, p.b, p.fm, p.fr, p.fb);
    err_sum += left.error + right.error - p.error;
    val_sum += left.value + right.value - p.value;
    heap.push(left);
    heap.push(right);
    // Resynchronize running sums now and then to cap drift.
    if (++refinements % 256 == 0) {
      auto [v, e] = totals();
      val_sum = v;
      err_sum = e;
    }
  }
  auto [v, e] = totals();
  return {v, e, static_cast<int>(heap.size())};
}

QuadratureResult integrate(const ScalarFn& f, double a, double b, const QuadratureConfig& cfg) {
  if (a > b) {
    auto r = integrate_piecewise(f, {b, a}, cfg);
    r.value = -r.value;
    return r;
  }
  return integrate_piecewise(f, {a, b}, cfg);
}

QuadratureResult integrate_to_infinity(const ScalarFn& f, double a, const QuadratureConfig& cfg) {
  auto mapped = [&f, a](double u) {
    if (u >= 1.0) return 0.0;
    double s = 1.0 - u;
    double x = a + u / s;
    if (!std::isfinite(x)) return 0.0;
    return f(x) / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, cfg);
}

QuadratureResult integrate_real_line(const ScalarFn& f, const QuadratureConfig& cfg) {
  QuadratureConfig half = cfg;
  half.abs_tol = 0.5 * cfg.abs_tol;
  auto right = integrate_to_infinity(f, 0.0, half);
  auto left = integrate_to_infinity([&f](double x) { return f(-x); }, 0.0, half);
  return {left.value + right.value, left.error + right.error, left.panels + right.panels};
}

}  // namespace annealed
