#include "annealed/schedule.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "annealed/errors.hpp"
#include "annealed/json_util.hpp"

namespace annealed {
namespace {

using std::numbers::pi;

// int_0^{1/2} w^2 / (c - k w^2) dw, requires k/4 < c
double j_integral(double c, double k) {
  const double q = std::sqrt(k / c);
  return (std::sqrt(c / k) * std::atanh(0.5 * q) - 0.5) / k;
}

// int_0^{1/2} w^2 / (a + k w^2) dw
double k_integral(double a, double k) {
  if (a == 0.0) return 0.5 / k;
  return (0.5 - std::sqrt(a / k) * std::atan(0.5 * std::sqrt(k / a))) / k;
}

}  // namespace

Schedule::Schedule(ScheduleParams p, double T) : params_(std::move(p)), T_(T) {
  if (!(T_ > 0.0) || !std::isfinite(T_)) throw DomainError("schedule: horizon T must be positive");
  if (auto* c = std::get_if<CosineSchedule>(&params_)) {
    if (!(c->alpha > 0.0)) throw DomainError("cosine schedule: alpha must be positive");
  } else if (auto* pl = std::get_if<LsiPlateau>(&params_)) {
    if (!(pl->kappa > 0.0 && pl->kappa < 1.0) || !(pl->alpha > 0.0))
      throw DomainError("lsi_plateau: need kappa in (0,1) and alpha > 0");
    if (!(std::pow(pl->kappa, pl->alpha) < 0.5)) throw DomainError("lsi_plateau: kappa^alpha must be below 1/2");
  } else if (auto* af = std::get_if<AffineClamped>(&params_)) {
    if (!(af->lambda0 >= 0.0 && af->lambda0 < af->lambdaT && af->lambdaT <= 1.0))
      throw DomainError("affine_clamped: need 0 <= lambda0 < lambdaT <= 1");
  }
}

Schedule Schedule::quadratic_piecewise(double T) { return Schedule(QuadraticPiecewise{}, T); }
Schedule Schedule::cosine(double T, double alpha) { return Schedule(CosineSchedule{alpha}, T); }
Schedule Schedule::lsi_plateau(double T, double kappa, double alpha) { return Schedule(LsiPlateau{kappa, alpha}, T); }
Schedule Schedule::affine_clamped(double T, double lambda0, double lambdaT) {
  return Schedule(AffineClamped{lambda0, lambdaT}, T);
}

Schedule Schedule::from_json(const nlohmann::json& j) {
  namespace ju = json_util;
  const std::string family = ju::string(j, "family");
  const double T = ju::number(j, "T");
  ju::require(T > 0.0 && std::isfinite(T), "T", "must be positive and finite");
  if (family == "quadratic_piecewise") return quadratic_piecewise(T);
  if (family == "cosine") {
    double a = ju::number_or(j, "alpha", 1.0);
    ju::require(a > 0.5, "alpha", "must exceed 1/2");
    return cosine(T, a);
  }
  if (family == "lsi_plateau") {
    double k = ju::number(j, "kappa");
    double a = ju::number(j, "alpha");
    ju::require(k > 0.0 && k < 1.0, "kappa", "must lie in (0, 1)");
    ju::require(a > 0.0, "alpha", "must be positive");
    ju::require(std::pow(k, a) < 0.5, "alpha", "kappa^alpha must be below 1/2");
    return lsi_plateau(T, k, a);
  }
  if (family == "affine_clamped") {
    double l0 = ju::number(j, "lambda0");
    double lT = ju::number(j, "lambdaT");
    ju::require(l0 >= 0.0 && l0 < 1.0, "lambda0", "must lie in [0, 1)");
    ju::require(lT > l0 && lT <= 1.0, "lambdaT", "must lie in (lambda0, 1]");
    return affine_clamped(T, l0, lT);
  }
  throw SchemaError("family", "unknown schedule family '" + family + "'");
}

nlohmann::json Schedule::to_json() const {
  nlohmann::json j;
  j["family"] = family_name();
  j["T"] = T_;
  if (auto* c = std::get_if<CosineSchedule>(&params_)) j["alpha"] = c->alpha;
  if (auto* p = std::get_if<LsiPlateau>(&params_)) {
    j["kappa"] = p->kappa;
    j["alpha"] = p->alpha;
  }
  if (auto* a = std::get_if<AffineClamped>(&params_)) {
    j["lambda0"] = a->lambda0;
    j["lambdaT"] = a->lambdaT;
  }
  return j;
}

std::string Schedule::family_name() const {
  switch (params_.index()) {
    case 0: return "quadratic_piecewise";
    case 1: return "cosine";
    case 2: return "lsi_plateau";
    default: return "affine_clamped";
  }
}

std::vector<double> Schedule::kinks() const {
  if (std::holds_alternative<QuadraticPiecewise>(params_) || std::holds_alternative<LsiPlateau>(params_))
    return {0.5 * T_};
  return {};
}

LambdaValue Schedule::eval(double t) const {
  // Grid points like T * i / n can land an ulp past T.
  if (t > T_ && t <= T_ * (1.0 + 1e-12)) t = T_;
  if (!(t >= 0.0 && t <= T_)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "schedule: t=%.17g outside [0, %.17g]", t, T_);
    throw DomainError(buf);
  }
  const double s = t / T_;
  if (std::holds_alternative<QuadraticPiecewise>(params_)) {
    if (s < 0.5) return {2.0 * s * s, 4.0 * s / T_};
    const double w = 1.0 - s;
    return {1.0 - 2.0 * w * w, 4.0 * w / T_};
  }
  if (auto* p = std::get_if<LsiPlateau>(&params_)) {
    if (s < 0.5) return {2.0 * s * s, 4.0 * s / T_};
    const double a = std::pow(p->kappa, p->alpha);
    const double b = 1.0 - 2.0 * a;
    const double w = 1.0 - s;
    return {1.0 - a - 2.0 * b * w * w, 4.0 * b * w / T_};
  }
  if (auto* c = std::get_if<CosineSchedule>(&params_)) {
    const double u = std::pow(s, c->alpha);
    const double lam = 0.5 * (1.0 + std::cos(pi * (1.0 - u)));
    double deriv;
    if (s == 0.0) {
      deriv = c->alpha > 0.5 ? 0.0 : (c->alpha == 0.5 ? pi * pi / (4.0 * T_) : kInf);
    } else {
      deriv = 0.5 * pi * std::sin(pi * u) * c->alpha * std::pow(s, c->alpha - 1.0) / T_;
    }
    return {lam, deriv};
  }
  const auto& a = std::get<AffineClamped>(params_);
  return {a.lambda0 + (a.lambdaT - a.lambda0) * s, (a.lambdaT - a.lambda0) / T_};
}

double Schedule::a0_density(double t) const {
  const LambdaValue v = eval(t);
  const double s = t / T_;
  const double T2 = T_ * T_;
  if (std::holds_alternative<QuadraticPiecewise>(params_) || std::holds_alternative<LsiPlateau>(params_)) {
    if (s < 0.5) return 8.0 / T2;
    return v.derivative * v.derivative / v.lambda;
  }
  if (auto* c = std::get_if<CosineSchedule>(&params_)) {
    if (s == 0.0) return c->alpha < 1.0 ? kInf : (c->alpha == 1.0 ? pi * pi / T2 : 0.0);
    const double u = std::pow(s, c->alpha);
    const double cc = std::cos(0.5 * pi * u);
    return pi * pi * c->alpha * c->alpha * cc * cc * std::pow(s, 2.0 * c->alpha - 2.0) / T2;
  }
  if (v.lambda == 0.0) return kInf;
  return v.derivative * v.derivative / v.lambda;
}

double Schedule::a1_density(double t) const {
  const LambdaValue v = eval(t);
  const double s = t / T_;
  const double T2 = T_ * T_;
  if (std::holds_alternative<QuadraticPiecewise>(params_)) {
    if (s >= 0.5) return 8.0 / T2;
    return 16.0 * s * s / (T2 * (1.0 - 2.0 * s * s));
  }
  if (auto* p = std::get_if<LsiPlateau>(&params_)) {
    if (s < 0.5) return 16.0 * s * s / (T2 * (1.0 - 2.0 * s * s));
    const double a = std::pow(p->kappa, p->alpha);
    const double b = 1.0 - 2.0 * a;
    const double w = 1.0 - s;
    return 16.0 * b * b * w * w / (T2 * (a + 2.0 * b * w * w));
  }
  if (auto* c = std::get_if<CosineSchedule>(&params_)) {
    if (s == 0.0) return 0.0;
    const double u = std::pow(s, c->alpha);
    const double sn = std::sin(0.5 * pi * u);
    return pi * pi * c->alpha * c->alpha * sn * sn * std::pow(s, 2.0 * c->alpha - 2.0) / T2;
  }
  if (v.lambda == 1.0) return kInf;
  return v.derivative * v.derivative / (1.0 - v.lambda);
}

namespace {

void check_endpoints(const Schedule& s) {
  if (auto* c = std::get_if<CosineSchedule>(&s.params())) {
    if (!(c->alpha > 0.5)) throw PreconditionError("A0 diverges at t=0: cosine schedule needs alpha > 1/2");
  }
  if (auto* a = std::get_if<AffineClamped>(&s.params())) {
    if (a->lambda0 == 0.0) throw PreconditionError("A0 diverges at t=0: affine schedule with lambda_0 = 0");
    if (a->lambdaT == 1.0) throw PreconditionError("A1 diverges at t=T: affine schedule with lambda_T = 1");
  }
}

// Cosine integrals after u = s^alpha, u = w^p with p = alpha/(2 alpha - 1),
// which removes the endpoint singularity.
std::pair<double, double> cosine_integrals(double T, double alpha, const QuadratureConfig& quad) {
  const double p = alpha / (2.0 * alpha - 1.0);
  const double pref = pi * pi * alpha / (T * (2.0 - 1.0 / alpha));
  auto c2 = [p](double w) {
    const double c = std::cos(0.5 * pi * std::pow(w, p));
    return c * c;
  };
  auto s2 = [p](double w) {
    const double s = std::sin(0.5 * pi * std::pow(w, p));
    return s * s;
  };
  return {pref * integrate(c2, 0.0, 1.0, quad).value, pref * integrate(s2, 0.0, 1.0, quad).value};
}

}  // namespace

std::pair<double, double> action_integrals_quadrature(const Schedule& s, const QuadratureConfig& quad) {
  check_endpoints(s);
  if (auto* c = std::get_if<CosineSchedule>(&s.params())) return cosine_integrals(s.horizon(), c->alpha, quad);
  std::vector<double> pts{0.0};
  for (double k : s.kinks()) pts.push_back(k);
  pts.push_back(s.horizon());
  auto f0 = [&s](double t) { return s.a0_density(t); };
  auto f1 = [&s](double t) { return s.a1_density(t); };
  return {integrate_piecewise(f0, pts, quad).value, integrate_piecewise(f1, pts, quad).value};
}

double a0_partial(const Schedule& s, double a, double b, const QuadratureConfig& quad) {
  std::vector<double> pts{a};
  for (double k : s.kinks())
    if (k > a && k < b) pts.push_back(k);
  pts.push_back(b);
  return integrate_piecewise([&s](double t) { return s.a0_density(t); }, pts, quad).value;
}

ActionSummary action_integrals(const Schedule& s, const MomentSummary& pi_m, const MomentSummary& nu_m,
                               const QuadratureConfig& quad) {
  check_endpoints(s);
  ActionSummary out;
  const double T = s.horizon();
  if (std::holds_alternative<QuadraticPiecewise>(s.params()) || std::holds_alternative<LsiPlateau>(s.params())) {
    double a = 0.0;
    if (auto* p = std::get_if<LsiPlateau>(&s.params())) a = std::pow(p->kappa, p->alpha);
    const double b = 1.0 - 2.0 * a;
    out.A0 = 4.0 / T + 16.0 * b * b * j_integral(1.0 - a, 2.0 * b) / T;
    out.A1 = 16.0 * j_integral(1.0, 2.0) / T + 16.0 * b * b * k_integral(a, 2.0 * b) / T;
    out.analytic = true;
  } else if (auto* af = std::get_if<AffineClamped>(&s.params())) {
    const double delta = af->lambdaT - af->lambda0;
    out.A0 = delta / T * std::log(af->lambdaT / af->lambda0);
    out.A1 = delta / T * std::log((1.0 - af->lambda0) / (1.0 - af->lambdaT));
    out.analytic = true;
  } else {
    auto [a0, a1] = action_integrals_quadrature(s, quad);
    out.A0 = a0;
    out.A1 = a1;
  }
  out.V_pi = pi_m.second_moment;
  out.V_nu = nu_m.second_moment;
  auto is_zero = [](const Vector& m) { return m.size() == 0 || m.norm() == 0.0; };
  out.centered = is_zero(pi_m.mean) || is_zero(nu_m.mean);
  const double c = out.centered ? 0.25 : 0.5;
  out.action_bound = c * ((out.V_pi > 0.0 ? out.V_pi * out.A0 : 0.0) + (out.V_nu > 0.0 ? out.V_nu * out.A1 : 0.0));
  return out;
}

double metric_derivative_bound(const Schedule& s, double t, double V_pi, double V_nu, bool centered) {
  const double c = centered ? 0.25 : 0.5;
  const double a = V_pi > 0.0 ? V_pi * s.a0_density(t) : 0.0;
  const double b = V_nu > 0.0 ? V_nu * s.a1_density(t) : 0.0;
  return c * (a + b);
}

double ActionSummary::pointwise(const Schedule& s, double t) const {
  return metric_derivative_bound(s, t, V_pi, V_nu, centered);
}

}  // namespace annealed
