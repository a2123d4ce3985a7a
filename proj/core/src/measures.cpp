#include "annealed/measures.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "annealed/errors.hpp"
#include "annealed/json_util.hpp"
#include "annealed/quadrature.hpp"

namespace annealed {
namespace {

using std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// log of the surface area of the unit sphere in R^d.
double log_sphere_area(int d) { return std::log(2.0) + 0.5 * d * std::log(pi) - std::lgamma(0.5 * d); }

double log_ball_volume(double r, int d) {
  return 0.5 * d * std::log(pi) - std::lgamma(0.5 * d + 1.0) + d * std::log(r);
}

// E|G| for G standard normal in R^d.
double gaussian_mean_norm(int d) {
  return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d));
}

double subbotin_h(double alpha, double r2) { return std::pow(1.0 + r2, 0.5 * alpha); }

// int_0^inf r^k exp(-(1+r^2)^{alpha/2}) dr
double subbotin_radial_integral(double alpha, int k) {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-13;
  cfg.max_panels = 200000;
  auto f = [alpha, k](double r) { return std::pow(r, k) * std::exp(-subbotin_h(alpha, r * r)); };
  return integrate_to_infinity(f, 0.0, cfg).value;
}

double ncx2_cdf(double x, double dof, double nc) {
  if (x <= 0.0) return 0.0;
  if (nc <= 0.0) return boost::math::cdf(boost::math::chi_squared_distribution<double>(dof), x);
  return boost::math::cdf(boost::math::non_central_chi_squared_distribution<double>(dof, nc), x);
}

double ncx2_sf(double x, double dof, double nc) {
  if (x <= 0.0) return 1.0;
  if (nc <= 0.0) return boost::math::cdf(complement(boost::math::chi_squared_distribution<double>(dof), x));
  return boost::math::cdf(complement(boost::math::non_central_chi_squared_distribution<double>(dof, nc), x));
}

// E sqrt(Q) for Q ~ noncentral chi^2(d, nc).
double ncx2_mean_sqrt(int d, double nc) {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-12;
  auto f = [d, nc](double u) { return ncx2_sf(u * u, d, nc); };
  return integrate_to_infinity(f, 0.0, cfg).value;
}

void check_point(const Vector& x, int d) {
  if (x.size() != d) throw DomainError("potential: point dimension mismatch");
  if (!x.allFinite()) throw DomainError("potential: non-finite point");
}

void draw_direction(Rng& rng, Eigen::Ref<Vector> out) {
  double n2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.normal();
    n2 = out.squaredNorm();
  } while (n2 == 0.0);
  out /= std::sqrt(n2);
}

}  // namespace

Potential::Potential(FamilyParams p, int dim) : params_(std::move(p)), dim_(dim) {
  if (dim_ < 1) throw DomainError("potential: dimension must be positive");
  const int d = dim_;
  std::visit(overloaded{
                 [&](const GaussianFamily& g) {
                   if (!(g.variance > 0.0) || !std::isfinite(g.variance))
                     throw DomainError("gaussian: variance must be positive");
                   log_z_ = 0.5 * d * std::log(2.0 * pi * g.variance);
                 },
                 [&](const GaussianMixtureFamily& m) {
                   if (m.weights.empty() || m.weights.size() != m.means.size())
                     throw DomainError("gaussian_mixture: weights and means must be nonempty and match");
                   if (!(m.variance > 0.0)) throw DomainError("gaussian_mixture: variance must be positive");
                   double total = 0.0;
                   for (std::size_t k = 0; k < m.weights.size(); ++k) {
                     if (!(m.weights[k] > 0.0)) throw DomainError("gaussian_mixture: weights must be positive");
                     if (m.means[k].size() != d || !m.means[k].allFinite())
                       throw DomainError("gaussian_mixture: means must be finite with matching dimension");
                     total += m.weights[k];
                   }
                   if (std::abs(total - 1.0) > 1e-9) throw DomainError("gaussian_mixture: weights must sum to 1");
                   log_z_ = 0.5 * d * std::log(2.0 * pi * m.variance);
                 },
                 [&](const StudentFamily& s) {
                   if (!(s.alpha > 0.0) || !(s.sigma > 0.0))
                     throw DomainError("student: alpha and sigma must be positive");
                   log_z_ = std::lgamma(0.5 * s.alpha) + 0.5 * d * std::log(s.alpha * pi * s.sigma * s.sigma) -
                            std::lgamma(0.5 * (s.alpha + d));
                 },
                 [&](const SubbotinFamily& s) {
                   if (!(s.alpha > 0.0 && s.alpha <= 2.0)) throw DomainError("subbotin: alpha must lie in (0, 2]");
                   log_z_ = log_sphere_area(d) + std::log(subbotin_radial_integral(s.alpha, d - 1));
                 },
                 [&](const UniformBallFamily& u) {
                   if (!(u.radius > 0.0)) throw DomainError("uniform_ball: radius must be positive");
                   log_z_ = log_ball_volume(u.radius, d);
                 },
                 [&](const CompactGaussianConvolutionFamily& c) {
                   if (!(c.radius >= 0.0) || !(c.smoothing_variance > 0.0))
                     throw DomainError("compact_gaussian_convolution: need radius >= 0 and tau2 > 0");
                   log_z_ = 0.0;
                 },
             },
             params_);
}

Potential Potential::gaussian(double variance, int dim) { return Potential(GaussianFamily{variance}, dim); }

Potential Potential::gaussian_mixture(std::vector<double> weights, std::vector<Vector> means, double variance) {
  int dim = means.empty() ? 0 : static_cast<int>(means.front().size());
  return Potential(GaussianMixtureFamily{std::move(weights), std::move(means), variance}, dim);
}

Potential Potential::student(double alpha, double sigma, int dim) {
  return Potential(StudentFamily{alpha, sigma}, dim);
}

Potential Potential::subbotin(double alpha, int dim) { return Potential(SubbotinFamily{alpha}, dim); }

Potential Potential::uniform_ball(double radius, int dim) { return Potential(UniformBallFamily{radius}, dim); }

Potential Potential::compact_gaussian_convolution(double radius, double smoothing_variance, int dim) {
  return Potential(CompactGaussianConvolutionFamily{radius, smoothing_variance}, dim);
}

Potential Potential::from_json(const nlohmann::json& j) {
  namespace ju = json_util;
  const std::string family = ju::string(j, "family");
  auto dim = [&] {
    long long d = ju::integer(j, "dim");
    ju::require(d >= 1 && d <= 100000, "dim", "must be a positive integer");
    return static_cast<int>(d);
  };
  auto positive = [&](const char* key) {
    double v = ju::number(j, key);
    ju::require(v > 0.0 && std::isfinite(v), key, "must be positive and finite");
    return v;
  };
  if (family == "gaussian") return gaussian(positive("variance"), dim());
  if (family == "student") {
    double a = positive("alpha");
    double s = ju::number_or(j, "sigma", 1.0);
    ju::require(s > 0.0 && std::isfinite(s), "sigma", "must be positive and finite");
    return student(a, s, dim());
  }
  if (family == "subbotin") {
    double a = ju::number(j, "alpha");
    ju::require(a > 0.0 && a <= 2.0, "alpha", "must lie in (0, 2]");
    return subbotin(a, dim());
  }
  if (family == "uniform_ball") return uniform_ball(positive("radius"), dim());
  if (family == "compact_gaussian_convolution") {
    double r = ju::number(j, "radius");
    ju::require(r >= 0.0 && std::isfinite(r), "radius", "must be nonnegative and finite");
    return compact_gaussian_convolution(r, positive("tau2"), dim());
  }
  if (family == "gaussian_mixture") {
    auto weights = ju::numbers(j, "weights");
    const auto& jm = ju::field(j, "means");
    ju::require(jm.is_array() && jm.size() == weights.size() && !weights.empty(), "means",
                "must be an array with one mean per weight");
    std::vector<Vector> means;
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const std::string key = "weights[" + std::to_string(k) + "]";
      ju::require(weights[k] > 0.0, key, "must be positive");
      total += weights[k];
      const std::string mkey = "means[" + std::to_string(k) + "]";
      ju::require(jm[k].is_array() && !jm[k].empty(), mkey, "must be a nonempty array");
      Vector m(static_cast<Eigen::Index>(jm[k].size()));
      for (std::size_t i = 0; i < jm[k].size(); ++i) {
        ju::require(jm[k][i].is_number(), mkey, "expected numbers");
        m(static_cast<Eigen::Index>(i)) = jm[k][i].get<double>();
      }
      ju::require(k == 0 || m.size() == means.front().size(), mkey, "dimension differs from means[0]");
      means.push_back(std::move(m));
    }
    ju::require(std::abs(total - 1.0) <= 1e-9, "weights", "must sum to 1");
    if (j.contains("dim"))
      ju::require(ju::integer(j, "dim") == means.front().size(), "dim", "must equal the dimension of the means");
    return gaussian_mixture(std::move(weights), std::move(means), positive("variance"));
  }
  throw SchemaError("family", "unknown family '" + family + "'");
}

nlohmann::json Potential::to_json() const {
  nlohmann::json j;
  j["family"] = family_name();
  j["dim"] = dim_;
  std::visit(overloaded{
                 [&](const GaussianFamily& g) { j["variance"] = g.variance; },
                 [&](const GaussianMixtureFamily& m) {
                   j["weights"] = m.weights;
                   nlohmann::json means = nlohmann::json::array();
                   for (const auto& v : m.means) means.push_back(std::vector<double>(v.data(), v.data() + v.size()));
                   j["means"] = means;
                   j["variance"] = m.variance;
                 },
                 [&](const StudentFamily& s) {
                   j["alpha"] = s.alpha;
                   j["sigma"] = s.sigma;
                 },
                 [&](const SubbotinFamily& s) { j["alpha"] = s.alpha; },
                 [&](const UniformBallFamily& u) { j["radius"] = u.radius; },
                 [&](const CompactGaussianConvolutionFamily& c) {
                   j["radius"] = c.radius;
                   j["tau2"] = c.smoothing_variance;
                 },
             },
             params_);
  return j;
}

std::string Potential::family_name() const {
  return std::visit(overloaded{
                        [](const GaussianFamily&) { return std::string("gaussian"); },
                        [](const GaussianMixtureFamily&) { return std::string("gaussian_mixture"); },
                        [](const StudentFamily&) { return std::string("student"); },
                        [](const SubbotinFamily&) { return std::string("subbotin"); },
                        [](const UniformBallFamily&) { return std::string("uniform_ball"); },
                        [](const CompactGaussianConvolutionFamily&) {
                          return std::string("compact_gaussian_convolution");
                        },
                    },
                    params_);
}

bool Potential::smooth() const { return !is<UniformBallFamily>() && !is<CompactGaussianConvolutionFamily>(); }

bool Potential::radial() const { return is<GaussianFamily>() || is<StudentFamily>() || is<SubbotinFamily>(); }

bool Potential::centered() const {
  if (!is<GaussianMixtureFamily>()) return true;
  const auto& m = as<GaussianMixtureFamily>();
  Vector mean = Vector::Zero(dim_);
  for (std::size_t k = 0; k < m.weights.size(); ++k) mean += m.weights[k] * m.means[k];
  return mean.norm() <= 1e-14 * (1.0 + m.means.front().norm());
}

void Potential::require_smooth(const char* op) const {
  if (!smooth())
    throw UnsupportedOperation(std::string(op) + ": family " + family_name() + " has no closed-form potential");
}

double Potential::radial_value(double r) const {
  if (!radial()) throw UnsupportedOperation("radial_value: family " + family_name() + " is not radial");
  const double r2 = r * r;
  if (is<GaussianFamily>()) return 0.5 * r2 / as<GaussianFamily>().variance + log_z_;
  if (is<StudentFamily>()) {
    const auto& s = as<StudentFamily>();
    return log_z_ + 0.5 * (s.alpha + dim_) * std::log1p(r2 / (s.alpha * s.sigma * s.sigma));
  }
  return subbotin_h(as<SubbotinFamily>().alpha, r2) + log_z_;
}

PotentialEval Potential::eval(const Vector& x) const {
  require_smooth("eval_potential");
  check_point(x, dim_);
  const int d = dim_;
  PotentialEval out{0.0, Vector(d), Matrix(d, d)};
  const double r2 = x.squaredNorm();
  const Matrix eye = Matrix::Identity(d, d);
  if (is<GaussianFamily>()) {
    const double v = as<GaussianFamily>().variance;
    out.value = 0.5 * r2 / v + log_z_;
    out.gradient = x / v;
    out.hessian = eye / v;
  } else if (is<StudentFamily>()) {
    const auto& s = as<StudentFamily>();
    const double a = s.alpha * s.sigma * s.sigma;
    const double q = a + r2;
    const double c = s.alpha + d;
    out.value = log_z_ + 0.5 * c * std::log1p(r2 / a);
    out.gradient = (c / q) * x;
    out.hessian = (c / q) * (eye - (2.0 / q) * x * x.transpose());
  } else if (is<SubbotinFamily>()) {
    const double al = as<SubbotinFamily>().alpha;
    const double base = 1.0 + r2;
    const double g = al * std::pow(base, 0.5 * al - 1.0);
    out.value = std::pow(base, 0.5 * al) + log_z_;
    out.gradient = g * x;
    // d/dx [g(r) x] = g I + 2 g'(r^2) x x^T with g' = al (al/2 - 1) base^{al/2-2}
    out.hessian = g * eye + (2.0 * al * (0.5 * al - 1.0) * std::pow(base, 0.5 * al - 2.0)) * x * x.transpose();
  } else {
    const auto& m = as<GaussianMixtureFamily>();
    const std::size_t k = m.weights.size();
    std::vector<double> logs(k);
    double peak = -kInf;
    for (std::size_t i = 0; i < k; ++i) {
      logs[i] = std::log(m.weights[i]) - 0.5 * (x - m.means[i]).squaredNorm() / m.variance;
      peak = std::max(peak, logs[i]);
    }
    double total = 0.0;
    for (auto& l : logs) total += (l = std::exp(l - peak));
    out.value = -(peak + std::log(total)) + log_z_;
    Vector mean_u = Vector::Zero(d);
    Matrix second = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < k; ++i) {
      const double resp = logs[i] / total;
      Vector u = (x - m.means[i]) / m.variance;
      mean_u += resp * u;
      second += resp * u * u.transpose();
    }
    out.gradient = mean_u;
    out.hessian = eye / m.variance - (second - mean_u * mean_u.transpose());
  }
  return out;
}

double Potential::value(const Vector& x) const {
  require_smooth("eval_potential");
  check_point(x, dim_);
  if (radial()) return radial_value(x.norm());
  return eval(x).value;
}

Vector Potential::gradient(const Vector& x) const {
  require_smooth("eval_potential");
  check_point(x, dim_);
  const double r2 = x.squaredNorm();
  if (is<GaussianFamily>()) return x / as<GaussianFamily>().variance;
  if (is<StudentFamily>()) {
    const auto& s = as<StudentFamily>();
    return ((s.alpha + dim_) / (s.alpha * s.sigma * s.sigma + r2)) * x;
  }
  if (is<SubbotinFamily>()) {
    const double al = as<SubbotinFamily>().alpha;
    return (al * std::pow(1.0 + r2, 0.5 * al - 1.0)) * x;
  }
  return eval(x).gradient;
}

double SmoothnessProfile::hess_abs() const { return std::max(std::abs(hess_upper), std::abs(hess_lower)); }

SmoothnessProfile known_profile(const Potential& p) {
  if (p.smooth()) return closed_form_profile(p);
  SmoothnessProfile prof;
  prof.dim = p.dim();
  return prof;
}

SmoothnessProfile closed_form_profile(const Potential& p) {
  if (!p.smooth())
    throw UnsupportedOperation("closed_form_profile: family " + p.family_name() + " has no closed-form potential");
  SmoothnessProfile prof;
  const int d = p.dim();
  prof.dim = d;
  if (p.is<GaussianFamily>()) {
    const double v = p.as<GaussianFamily>().variance;
    prof.grad_sup = kInf;
    prof.hess_upper = prof.hess_lower = prof.hess_lower_at_infinity = 1.0 / v;
    prof.grad_lipschitz = 1.0 / v;
    prof.quasiconvex = QuasiConvexity{1.0 / v, 2.0, 0.0};
    prof.drift_growth = DriftGrowth{1.0 / v, 2.0};
    prof.poincare_constant = v;
    prof.logsobolev_constant = v;
  } else if (p.is<StudentFamily>()) {
    const auto& s = p.as<StudentFamily>();
    const double c = s.alpha + d;
    const double s2 = s.sigma * s.sigma;
    prof.grad_sup = c / (2.0 * s.sigma * std::sqrt(s.alpha));
    prof.hess_upper = c / (s.alpha * s2);
    // Exact minimum of the radial eigenvalue, attained at |y|^2 = 3 alpha sigma^2.
    prof.hess_lower = -c / (8.0 * s.alpha * s2);
    prof.hess_lower_at_infinity = prof.hess_lower;
    prof.grad_lipschitz = prof.hess_upper;
    prof.drift_growth = DriftGrowth{prof.grad_sup, 1.0};
  } else if (p.is<SubbotinFamily>()) {
    const double a = p.as<SubbotinFamily>().alpha;
    prof.hess_upper = a;
    prof.grad_lipschitz = a;
    if (a < 1.0) {
      const double r2 = 1.0 / (1.0 - a);
      prof.grad_sup = a * std::sqrt(r2) * std::pow(1.0 + r2, 0.5 * a - 1.0);
      const double s = 3.0 / (1.0 - a);
      prof.hess_lower = a * std::pow(1.0 + s, 0.5 * a - 2.0) * (1.0 + (a - 1.0) * s);
      prof.drift_growth = DriftGrowth{prof.grad_sup, 1.0};
    } else {
      prof.grad_sup = a == 1.0 ? 1.0 : kInf;
      prof.hess_lower = a == 2.0 ? 2.0 : 0.0;
      // <x, grad H> / |x|^a = a (r^2/(1+r^2))^{1-a/2} is increasing in r.
      prof.quasiconvex = QuasiConvexity{a * std::pow(0.5, 1.0 - 0.5 * a), a, 1.0};
      prof.drift_growth = DriftGrowth{a, a};
    }
    prof.hess_lower_at_infinity = prof.hess_lower;
    if (a == 2.0) {
      prof.poincare_constant = 0.5;
      prof.logsobolev_constant = 0.5;
    }
  } else {
    const auto& m = p.as<GaussianMixtureFamily>();
    const double s2 = m.variance;
    double diam = 0.0, max_norm = 0.0;
    for (std::size_t i = 0; i < m.means.size(); ++i) {
      max_norm = std::max(max_norm, m.means[i].norm());
      for (std::size_t j = i + 1; j < m.means.size(); ++j) diam = std::max(diam, (m.means[i] - m.means[j]).norm());
    }
    prof.grad_sup = kInf;
    prof.hess_upper = 1.0 / s2;
    prof.hess_lower = 1.0 / s2 - diam * diam / (4.0 * s2 * s2);
    prof.hess_lower_at_infinity = prof.hess_lower;
    prof.grad_lipschitz = prof.hess_abs();
    prof.quasiconvex = QuasiConvexity{0.5 / s2, 2.0, 2.0 * max_norm};
  }
  prof.convexity_radius = 0.0;
  return prof;
}

double hess_lower_beyond(const Potential& p, double r) {
  if (!(r >= 0.0)) throw DomainError("hess_lower_beyond: radius must be nonnegative");
  const SmoothnessProfile prof = closed_form_profile(p);
  const int d = p.dim();
  if (p.is<StudentFamily>()) {
    const auto& s = p.as<StudentFamily>();
    const double a = s.alpha * s.sigma * s.sigma;
    const double r2 = r * r;
    if (r2 <= 3.0 * a) return prof.hess_lower;
    // Radial eigenvalue increases towards 0 beyond the minimizer.
    return (s.alpha + d) * (a - r2) / ((a + r2) * (a + r2));
  }
  if (p.is<SubbotinFamily>()) {
    const double al = p.as<SubbotinFamily>().alpha;
    if (al < 1.0) {
      const double s_star = 3.0 / (1.0 - al);
      const double s = std::max(r * r, s_star);
      return al * std::pow(1.0 + s, 0.5 * al - 2.0) * (1.0 + (al - 1.0) * s);
    }
    return prof.hess_lower;
  }
  return prof.hess_lower;
}

SmoothnessProfile with_convexity_radius(const Potential& p, SmoothnessProfile prof, double r) {
  prof.hess_lower_at_infinity = hess_lower_beyond(p, r);
  prof.convexity_radius = r;
  return prof;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

const CheckOutcome& VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw DomainError("verification report: no check named " + name);
}

VerificationReport verify_profile(const Potential& p, const SmoothnessProfile& prof, const PointBatch& grid,
                                  double tol) {
  if (grid.rows() == 0) throw DomainError("verify_profile: empty grid");
  if (grid.cols() != p.dim()) throw DomainError("verify_profile: grid dimension mismatch");
  if (!grid.allFinite()) throw DomainError("verify_profile: non-finite grid point");
  auto slack = [tol](double bound) { return tol * (1.0 + std::abs(bound)); };

  CheckOutcome grad{"grad_sup", true, 0.0, prof.grad_sup, Vector()};
  CheckOutcome upper{"hess_upper", true, -kInf, prof.hess_upper, Vector()};
  CheckOutcome lower{"hess_lower", true, kInf, prof.hess_lower, Vector()};
  CheckOutcome infinity{"hess_lower_at_infinity", true, kInf, prof.hess_lower_at_infinity, Vector()};
  CheckOutcome quasi{"quasiconvex", true, kInf, prof.quasiconvex ? prof.quasiconvex->alpha : 0.0, Vector()};
  CheckOutcome drift{"drift_growth", true, -kInf, prof.drift_growth ? prof.drift_growth->kappa : 0.0, Vector()};

  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const Vector x = grid.row(i).transpose();
    const PotentialEval e = p.eval(x);
    const double r = x.norm();
    const double gnorm = e.gradient.norm();
    if (gnorm > grad.worst_value || grad.worst_point.size() == 0) {
      grad.worst_value = gnorm;
      grad.worst_point = x;
    }
    eig.compute(e.hessian, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (hi > upper.worst_value) {
      upper.worst_value = hi;
      upper.worst_point = x;
    }
    if (lo < lower.worst_value) {
      lower.worst_value = lo;
      lower.worst_point = x;
    }
    if (r >= prof.convexity_radius && lo < infinity.worst_value) {
      infinity.worst_value = lo;
      infinity.worst_point = x;
    }
    const double radial = x.dot(e.gradient);
    if (prof.quasiconvex && r >= prof.quasiconvex->radius && r > 0.0) {
      // Ratio <x, grad H> / |x|^beta, compared against alpha.
      const double ratio = radial / std::pow(r, prof.quasiconvex->beta);
      if (ratio < quasi.worst_value) {
        quasi.worst_value = ratio;
        quasi.worst_point = x;
      }
    }
    if (prof.drift_growth && r > 0.0) {
      const double ratio = std::abs(radial) / std::pow(r, prof.drift_growth->beta);
      if (ratio > drift.worst_value) {
        drift.worst_value = ratio;
        drift.worst_point = x;
      }
    }
  }
  grad.passed = grad.worst_value <= prof.grad_sup + slack(prof.grad_sup);
  upper.passed = upper.worst_value <= prof.hess_upper + slack(prof.hess_upper);
  lower.passed = lower.worst_value >= prof.hess_lower - slack(prof.hess_lower);
  infinity.passed = infinity.worst_point.size() == 0 ||
                    infinity.worst_value >= prof.hess_lower_at_infinity - slack(prof.hess_lower_at_infinity);
  quasi.passed = !prof.quasiconvex || quasi.worst_point.size() == 0 || quasi.worst_value >= quasi.declared - slack(quasi.declared);
  drift.passed = !prof.drift_growth || drift.worst_point.size() == 0 || drift.worst_value <= drift.declared + slack(drift.declared);

  VerificationReport rep;
  rep.checks = {grad, upper, lower, infinity};
  if (prof.quasiconvex) rep.checks.push_back(quasi);
  if (prof.drift_growth) rep.checks.push_back(drift);
  return rep;
}

PointBatch canonical_radial_grid(int dim, int n, double r_max) {
  if (dim < 1 || n < 1 || !(r_max > 0.0)) throw DomainError("canonical_radial_grid: invalid arguments");
  std::vector<Vector> dirs;
  for (int i = 0; i < dim; ++i) dirs.push_back(Vector::Unit(dim, i));
  if (dim >= 2) {
    dirs.push_back(Vector::Ones(dim).normalized());
    Vector v = Vector::Zero(dim);
    v(0) = 1.0;
    v(1) = -1.0;
    dirs.push_back(v.normalized());
  } else {
    dirs.push_back(-Vector::Unit(1, 0));
  }
  PointBatch grid(n, dim);
  for (int k = 0; k < n; ++k) {
    const double r = n == 1 ? 0.0 : r_max * static_cast<double>(k) / (n - 1);
    grid.row(k) = (r * dirs[static_cast<std::size_t>(k) % dirs.size()]).transpose();
  }
  return grid;
}

void draw(const Potential& p, Rng& rng, Eigen::Ref<Vector> out) {
  const int d = p.dim();
  if (out.size() != d) throw DomainError("draw: output dimension mismatch");
  std::visit(overloaded{
                 [&](const GaussianFamily& g) {
                   const double s = std::sqrt(g.variance);
                   for (int i = 0; i < d; ++i) out(i) = s * rng.normal();
                 },
                 [&](const GaussianMixtureFamily& m) {
                   double u = rng.uniform();
                   std::size_t k = 0;
                   while (k + 1 < m.weights.size() && u >= m.weights[k]) u -= m.weights[k++];
                   const double s = std::sqrt(m.variance);
                   for (int i = 0; i < d; ++i) out(i) = m.means[k](i) + s * rng.normal();
                 },
                 [&](const StudentFamily& s) {
                   // sigma Z / sqrt(chi^2_alpha / alpha)
                   for (int i = 0; i < d; ++i) out(i) = rng.normal();
                   const double scale = s.sigma / std::sqrt(rng.chi_squared(s.alpha) / s.alpha);
                   out *= scale;
                 },
                 [&](const SubbotinFamily& s) {
                   // Radius by rejection from the envelope r^{d-1} e^{-r^a}
                   // (r^a ~ Gamma(d/a)); acceptance exp(r^a - (1+r^2)^{a/2}) <= 1.
                   const double a = s.alpha;
                   double r = 0.0;
                   for (;;) {
                     const double g = rng.gamma(d / a);
                     r = std::pow(g, 1.0 / a);
                     if (rng.uniform() <= std::exp(g - subbotin_h(a, r * r))) break;
                   }
                   draw_direction(rng, out);
                   out *= r;
                 },
                 [&](const UniformBallFamily& u) {
                   const double r = u.radius * std::pow(rng.uniform(), 1.0 / d);
                   draw_direction(rng, out);
                   out *= r;
                 },
                 [&](const CompactGaussianConvolutionFamily& c) {
                   const double r = c.radius * std::pow(rng.uniform(), 1.0 / d);
                   draw_direction(rng, out);
                   out *= r;
                   const double s = std::sqrt(c.smoothing_variance);
                   for (int i = 0; i < d; ++i) out(i) += s * rng.normal();
                 },
             },
             p.params());
}

PointBatch sample_measure(const Potential& p, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_measure: n must be positive");
  PointBatch out(n, p.dim());
  Rng rng(seed, 0);
  Vector x(p.dim());
  for (int i = 0; i < n; ++i) {
    draw(p, rng, x);
    out.row(i) = x.transpose();
  }
  return out;
}

MomentSummary moments(const Potential& p) {
  const int d = p.dim();
  MomentSummary m;
  m.mean = Vector::Zero(d);
  std::visit(overloaded{
                 [&](const GaussianFamily& g) {
                   m.second_moment = g.variance * d;
                   m.mean_abs = std::sqrt(g.variance) * gaussian_mean_norm(d);
                   m.covariance = g.variance * Matrix::Identity(d, d);
                 },
                 [&](const GaussianMixtureFamily& mix) {
                   const double s = std::sqrt(mix.variance);
                   Matrix second = Matrix::Zero(d, d);
                   for (std::size_t k = 0; k < mix.weights.size(); ++k) {
                     const double w = mix.weights[k];
                     const Vector& mu = mix.means[k];
                     m.mean += w * mu;
                     m.second_moment += w * (mu.squaredNorm() + mix.variance * d);
                     m.mean_abs += w * s * ncx2_mean_sqrt(d, mu.squaredNorm() / mix.variance);
                     second += w * (mu * mu.transpose() + mix.variance * Matrix::Identity(d, d));
                   }
                   m.covariance = second - m.mean * m.mean.transpose();
                 },
                 [&](const StudentFamily& s) {
                   if (!(s.alpha > 2.0))
                     throw PreconditionError("student: α>2 required for a finite second moment (alpha=" +
                                             std::to_string(s.alpha) + ")");
                   const double var = s.alpha * s.sigma * s.sigma / (s.alpha - 2.0);
                   m.second_moment = var * d;
                   m.mean_abs = s.sigma * gaussian_mean_norm(d) * std::sqrt(0.5 * s.alpha) *
                                std::exp(std::lgamma(0.5 * (s.alpha - 1.0)) - std::lgamma(0.5 * s.alpha));
                   m.covariance = var * Matrix::Identity(d, d);
                 },
                 [&](const SubbotinFamily& s) {
                   const double base = subbotin_radial_integral(s.alpha, d - 1);
                   m.second_moment = subbotin_radial_integral(s.alpha, d + 1) / base;
                   m.mean_abs = subbotin_radial_integral(s.alpha, d) / base;
                   m.covariance = (m.second_moment / d) * Matrix::Identity(d, d);
                 },
                 [&](const UniformBallFamily& u) {
                   m.second_moment = u.radius * u.radius * d / (d + 2.0);
                   m.mean_abs = u.radius * d / (d + 1.0);
                   m.covariance = (u.radius * u.radius / (d + 2.0)) * Matrix::Identity(d, d);
                 },
                 [&](const CompactGaussianConvolutionFamily& c) {
                   // Bounds valid for any law supported in the ball; the
                   // covariance is that of the uniform compact component.
                   const double tau = std::sqrt(c.smoothing_variance);
                   m.second_moment = c.radius * c.radius + c.smoothing_variance * d;
                   m.mean_abs = std::min(c.radius + tau * gaussian_mean_norm(d), std::sqrt(m.second_moment));
                   m.second_moment_is_upper_bound = true;
                   m.covariance =
                       (c.radius * c.radius / (d + 2.0) + c.smoothing_variance) * Matrix::Identity(d, d);
                 },
             },
             p.params());
  return m;
}

double ball_mass(const Potential& p, double r) {
  if (!(r >= 0.0)) throw DomainError("ball_mass: radius must be nonnegative");
  if (r == 0.0) return 0.0;
  const int d = p.dim();
  if (p.is<GaussianFamily>())
    return boost::math::gamma_p(0.5 * d, 0.5 * r * r / p.as<GaussianFamily>().variance);
  if (p.is<UniformBallFamily>()) return std::min(1.0, std::pow(r / p.as<UniformBallFamily>().radius, d));
  if (p.is<GaussianMixtureFamily>()) {
    const auto& m = p.as<GaussianMixtureFamily>();
    double total = 0.0;
    for (std::size_t k = 0; k < m.weights.size(); ++k)
      total += m.weights[k] * ncx2_cdf(r * r / m.variance, d, m.means[k].squaredNorm() / m.variance);
    return total;
  }
  if (p.radial()) {
    const double log_s = log_sphere_area(d);
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-14;
    auto f = [&](double s) { return std::exp(log_s + (d - 1) * std::log(s) - p.radial_value(s)); };
    auto g = [&](double s) { return s == 0.0 ? (d == 1 ? std::exp(log_s - p.radial_value(0.0)) : 0.0) : f(s); };
    return std::min(1.0, integrate(g, 0.0, r, cfg).value);
  }
  throw UnsupportedOperation("ball_mass: unsupported family " + p.family_name());
}

double oscillation_on_ball(const Potential& p, double r) {
  if (!(r >= 0.0)) throw DomainError("oscillation_on_ball: radius must be nonnegative");
  if (!p.radial()) throw UnsupportedOperation("oscillation_on_ball: family " + p.family_name() + " is not radial");
  return p.radial_value(r) - p.radial_value(0.0);
}

}  // namespace annealed
