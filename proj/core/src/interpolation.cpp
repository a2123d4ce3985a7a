#include "annealed/interpolation.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "annealed/errors.hpp"
#include "annealed/json_util.hpp"

namespace annealed {
namespace {

using std::numbers::pi;

// Lower and upper tail of the noncentral chi-square law.
struct Ncx2 {
  double cdf;
  double sf;
};

Ncx2 ncx2(double y, double dof, double nc) {
  if (nc <= 0.0) {
    boost::math::chi_squared_distribution<double> dist(dof);
    return {boost::math::cdf(dist, y), boost::math::cdf(complement(dist, y))};
  }
  boost::math::non_central_chi_squared_distribution<double> dist(dof, nc);
  return {boost::math::cdf(dist, y), boost::math::cdf(complement(dist, y))};
}

// F_a - F_b from whichever tail is better conditioned.
double tail_difference(const Ncx2& a, const Ncx2& b) {
  if (a.cdf < 0.5 && b.cdf < 0.5) return a.cdf - b.cdf;
  return b.sf - a.sf;
}

double log_ball_volume(double r, int d) {
  return 0.5 * d * std::log(pi) - std::lgamma(0.5 * d + 1.0) + d * std::log(r);
}

// Uniform law on B(0, rho) convolved with N(0, a2 I), at |x| = r >> rho + a:
// Laplace expansion around the nearest sphere point. Relative error O(a2 / (r - rho)^2).
double far_field_log_density(double r, double rho, double a2, int d) {
  const double gap = r - rho;
  return -0.5 * d * std::log(2.0 * pi * a2) - log_ball_volume(rho, d) - 0.5 * gap * gap / a2 + std::log(a2 / gap) +
         0.5 * (d - 1) * std::log(2.0 * pi * a2 / (r * rho)) + (d - 1) * std::log(rho);
}

std::string describe(double lambda, const Vector& x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " (lambda=%.6g, |x|=%.6g)", lambda, x.norm());
  return buf;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("interpolation: lambda outside [0,1]");
}

// Per-particle features for weighted moment estimation with jackknife errors.
struct Accumulator {
  int p = 0;  // features whose mean is needed
  int q = 0;  // leading features whose second moment is needed
  std::vector<double> w;
  std::vector<Vector> s1;
  std::vector<Matrix> s2;

  Accumulator(int blocks, int p_, int q_) : p(p_), q(q_), w(blocks, 0.0), s1(blocks, Vector::Zero(p_)) {
    if (q > 0) s2.assign(blocks, Matrix::Zero(q, q));
  }
  void add(int b, double wi, const Vector& f) {
    w[b] += wi;
    s1[b] += wi * f;
    if (q > 0) s2[b].noalias() += wi * f.head(q) * f.head(q).transpose();
  }
};

using Estimator = std::function<Matrix(double, const Vector&, const Matrix&)>;

struct JackknifeResult {
  Matrix value;
  Matrix std_error;
};

JackknifeResult jackknife(const Accumulator& acc, const Estimator& est) {
  const int B = static_cast<int>(acc.w.size());
  double W = 0.0;
  Vector S1 = Vector::Zero(acc.p);
  Matrix S2 = Matrix::Zero(acc.q, acc.q);
  for (int b = 0; b < B; ++b) {
    W += acc.w[b];
    S1 += acc.s1[b];
    if (acc.q > 0) S2 += acc.s2[b];
  }
  JackknifeResult r;
  r.value = est(W, S1 / W, acc.q > 0 ? Matrix(S2 / W) : Matrix());
  std::vector<Matrix> loo;
  loo.reserve(B);
  Matrix mean = Matrix::Zero(r.value.rows(), r.value.cols());
  int used = 0;
  for (int b = 0; b < B; ++b) {
    const double Wb = W - acc.w[b];
    if (!(Wb > 0.0)) continue;
    loo.push_back(est(Wb, (S1 - acc.s1[b]) / Wb, acc.q > 0 ? Matrix((S2 - acc.s2[b]) / Wb) : Matrix()));
    mean += loo.back();
    ++used;
  }
  r.std_error = Matrix::Zero(r.value.rows(), r.value.cols());
  if (used >= 2) {
    mean /= used;
    for (const auto& m : loo) r.std_error += (m - mean).cwiseAbs2();
    r.std_error = (r.std_error * (static_cast<double>(used - 1) / used)).cwiseSqrt();
  }
  return r;
}

// Weighted particles from q_t^x: y = sqrt(lambda) X with weight e^{-W_t(x-y)},
// or (swapped) y = x - sqrt(1-lambda) Z with weight e^{-U_t(y)}.
struct Particles {
  PointBatch y;
  std::vector<double> w;  // unnormalized, max 1
  double ess = 0.0;
};

Particles propose(const InterpolationLaw& law, double lambda, const Vector& x, int n, std::uint64_t seed,
                  bool swapped, double ess_fraction) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw UnsupportedOperation("conditional law needs lambda in (0,1); endpoints delegate to the potentials" +
                               describe(lambda, x));
  if (n < 2) throw DomainError("snis: need at least two particles");
  const Potential& weight_pot = swapped ? law.target() : law.base();
  if (!weight_pot.smooth())
    throw UnsupportedOperation("snis: weights need a closed-form potential for " + weight_pot.family_name() +
                               (swapped ? "; use the standard representation" : "; use the swapped representation"));
  const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
  Particles p;
  p.y = sample_measure(swapped ? law.base() : law.target(), n, seed);
  p.w.resize(n);
  std::vector<double> logw(n);
  double peak = -kInf;
  for (int i = 0; i < n; ++i) {
    Vector yi;
    Vector arg;
    if (!swapped) {
      yi = sl * p.y.row(i).transpose();
      arg = (x - yi) / s1l;
    } else {
      yi = x - s1l * p.y.row(i).transpose();
      arg = yi / sl;
    }
    p.y.row(i) = yi.transpose();
    logw[i] = -weight_pot.value(arg);
    peak = std::max(peak, logw[i]);
  }
  if (!std::isfinite(peak)) throw DegenerateWeights("snis: all weights vanish" + describe(lambda, x));
  double sw = 0.0, sw2 = 0.0;
  for (int i = 0; i < n; ++i) {
    p.w[i] = std::exp(logw[i] - peak);
    sw += p.w[i];
    sw2 += p.w[i] * p.w[i];
  }
  p.ess = sw * sw / sw2;
  if (p.ess < ess_fraction * n) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "snis: effective sample size %.1f below threshold %.1f; increase particles or use the %s "
                  "representation",
                  p.ess, ess_fraction * n, swapped ? "standard" : "swapped");
    throw DegenerateWeights(std::string(buf) + describe(lambda, x));
  }
  return p;
}

int block_of(int i, int n, int blocks) { return static_cast<int>(static_cast<long long>(i) * blocks / n); }

Matrix delegate_hessian(const Potential& p, const Vector& x) {
  if (!p.smooth()) throw UnsupportedOperation("endpoint Hessian: family " + p.family_name() + " is not smooth");
  return -p.eval(x).hessian;
}

}  // namespace

std::string to_string(HessianForm f) {
  switch (f) {
    case HessianForm::w_form: return "w_form";
    case HessianForm::u_form: return "u_form";
    default: return "mixed";
  }
}

InterpolationLaw::InterpolationLaw(Potential target, Potential base, Schedule schedule)
    : target_(std::move(target)), base_(std::move(base)), schedule_(std::move(schedule)) {
  if (target_.dim() != base_.dim()) throw DomainError("interpolation: target and base dimensions differ");
  auto mixture_view = [](const Potential& p, std::vector<std::pair<double, Vector>>& comps, double& var) {
    if (p.is<GaussianFamily>()) {
      comps = {{0.0, Vector::Zero(p.dim())}};
      var = p.as<GaussianFamily>().variance;
      return true;
    }
    if (p.is<GaussianMixtureFamily>()) {
      const auto& m = p.as<GaussianMixtureFamily>();
      comps.clear();
      for (std::size_t k = 0; k < m.weights.size(); ++k) comps.emplace_back(std::log(m.weights[k]), m.means[k]);
      var = m.variance;
      return true;
    }
    return false;
  };
  std::vector<std::pair<double, Vector>> tc, bc;
  if (mixture_view(target_, tc, target_var_) && mixture_view(base_, bc, base_var_)) {
    kind_ = Kind::mixture;
    for (const auto& [lt, mt] : tc)
      for (const auto& [lb, mb] : bc) components_.push_back({lt + lb, mt, mb});
    return;
  }
  auto compact_view = [this](const Potential& compact, const Potential& other, bool is_target) {
    if (!other.is<GaussianFamily>()) return false;
    if (compact.is<UniformBallFamily>()) {
      compact_radius_ = compact.as<UniformBallFamily>().radius;
      compact_smoothing_ = 0.0;
    } else if (compact.is<CompactGaussianConvolutionFamily>()) {
      compact_radius_ = compact.as<CompactGaussianConvolutionFamily>().radius;
      compact_smoothing_ = compact.as<CompactGaussianConvolutionFamily>().smoothing_variance;
    } else {
      return false;
    }
    gaussian_var_ = other.as<GaussianFamily>().variance;
    compact_is_target_ = is_target;
    return true;
  };
  if (compact_view(target_, base_, true) || compact_view(base_, target_, false)) kind_ = Kind::compact;
}

InterpolationLaw InterpolationLaw::from_json(const nlohmann::json& j) {
  auto sub = [&j](const char* key, auto parse) {
    try {
      return parse(json_util::field(j, key));
    } catch (const SchemaError& e) {
      throw e.prefixed(key);
    }
  };
  return InterpolationLaw(sub("target", Potential::from_json), sub("base", Potential::from_json),
                          sub("schedule", Schedule::from_json));
}

void InterpolationLaw::compact_params(double lambda, double& rho, double& alpha2) const {
  const double lc = compact_is_target_ ? lambda : 1.0 - lambda;
  rho = std::sqrt(lc) * compact_radius_;
  alpha2 = lc * compact_smoothing_ + (1.0 - lc) * gaussian_var_;
}

bool InterpolationLaw::closed_form_score(double lambda, const Eigen::Ref<const Vector>& x,
                                         Eigen::Ref<Vector> out) const {
  if (kind_ == Kind::none) return false;
  const int d = dim();
  if (kind_ == Kind::mixture) {
    const double v = lambda * target_var_ + (1.0 - lambda) * base_var_;
    if (!(v > 0.0)) return false;
    if (components_.size() == 1) {
      const auto& c = components_.front();
      out = -(x - std::sqrt(lambda) * c.target_mean - std::sqrt(1.0 - lambda) * c.base_mean) / v;
      return true;
    }
    const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
    double peak = -kInf;
    std::vector<double> lw(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const auto& c = components_[k];
      lw[k] = c.log_weight - 0.5 * (x - sl * c.target_mean - s1l * c.base_mean).squaredNorm() / v;
      peak = std::max(peak, lw[k]);
    }
    double total = 0.0;
    for (auto& l : lw) total += (l = std::exp(l - peak));
    out.setZero();
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const auto& c = components_[k];
      out -= (lw[k] / total) * (x - sl * c.target_mean - s1l * c.base_mean) / v;
    }
    return true;
  }
  double rho, a2;
  compact_params(lambda, rho, a2);
  if (!(a2 > 0.0)) return false;
  if (rho == 0.0) {
    out = -x / a2;
    return true;
  }
  const double y = rho * rho / a2;
  const double delta = x.squaredNorm() / a2;
  const Ncx2 f0 = ncx2(y, d, delta);
  if (f0.cdf < 1e-280) {
    // Far field: gradient of the Laplace expansion in far_field_log_density.
    const double r = x.norm();
    out = -((r - rho) / a2 + 1.0 / (r - rho) + 0.5 * (d - 1) / r) * x / r;
    return true;
  }
  const Ncx2 f2 = ncx2(y, d + 2, delta);
  const double g = tail_difference(f0, f2) / f0.cdf;
  out = -g * x / a2;
  return true;
}

std::optional<double> InterpolationLaw::closed_form_log_density(double lambda, const Vector& x) const {
  const int d = dim();
  if (kind_ == Kind::mixture) {
    const double v = lambda * target_var_ + (1.0 - lambda) * base_var_;
    const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
    double peak = -kInf;
    std::vector<double> lw(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const auto& c = components_[k];
      lw[k] = c.log_weight - 0.5 * (x - sl * c.target_mean - s1l * c.base_mean).squaredNorm() / v;
      peak = std::max(peak, lw[k]);
    }
    double total = 0.0;
    for (double l : lw) total += std::exp(l - peak);
    return peak + std::log(total) - 0.5 * d * std::log(2.0 * pi * v);
  }
  if (kind_ == Kind::compact) {
    double rho, a2;
    compact_params(lambda, rho, a2);
    if (!(a2 > 0.0)) return std::nullopt;
    if (rho == 0.0) return -0.5 * x.squaredNorm() / a2 - 0.5 * d * std::log(2.0 * pi * a2);
    const Ncx2 f0 = ncx2(rho * rho / a2, d, x.squaredNorm() / a2);
    if (f0.cdf < 1e-280) return far_field_log_density(x.norm(), rho, a2, d);
    return std::log(f0.cdf) - log_ball_volume(rho, d);
  }
  return std::nullopt;
}

std::optional<Matrix> InterpolationLaw::closed_form_hessian(double lambda, const Vector& x) const {
  const int d = dim();
  const Matrix eye = Matrix::Identity(d, d);
  if (kind_ == Kind::mixture) {
    const double v = lambda * target_var_ + (1.0 - lambda) * base_var_;
    const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
    double peak = -kInf;
    std::vector<double> lw(components_.size());
    std::vector<Vector> u(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const auto& c = components_[k];
      u[k] = (x - sl * c.target_mean - s1l * c.base_mean) / v;
      lw[k] = c.log_weight - 0.5 * v * u[k].squaredNorm();
      peak = std::max(peak, lw[k]);
    }
    double total = 0.0;
    for (auto& l : lw) total += (l = std::exp(l - peak));
    Vector mean = Vector::Zero(d);
    Matrix second = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < components_.size(); ++k) {
      mean += (lw[k] / total) * u[k];
      second += (lw[k] / total) * u[k] * u[k].transpose();
    }
    return Matrix(-eye / v + second - mean * mean.transpose());
  }
  if (kind_ == Kind::compact) {
    double rho, a2;
    compact_params(lambda, rho, a2);
    if (!(a2 > 0.0)) return std::nullopt;
    if (rho == 0.0) return Matrix(-eye / a2);
    const double y = rho * rho / a2;
    const double delta = x.squaredNorm() / a2;
    const Ncx2 f0 = ncx2(y, d, delta);
    if (f0.cdf < 1e-280) {
      const double r = x.norm();
      const Vector e = x / r;
      return Matrix(-eye / a2 + (rho / (r * a2)) * (eye - e * e.transpose()));
    }
    const Ncx2 f2 = ncx2(y, d + 2, delta);
    const Ncx2 f4 = ncx2(y, d + 4, delta);
    const double d1 = tail_difference(f0, f2);
    const double d2 = tail_difference(f2, f4);
    const double g = -d1 / f0.cdf;
    const double gp = 0.5 * ((d1 - d2) / f0.cdf - g * g);
    return Matrix((g / a2) * eye + (2.0 * gp / (a2 * a2)) * x * x.transpose());
  }
  return std::nullopt;
}

PointBatch sample_interpolant(const InterpolationLaw& law, double t, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_interpolant: n must be positive");
  const double lambda = law.lambda_at(t);
  const PointBatch X = sample_measure(law.target(), n, splitmix64(seed) ^ 0x1ULL);
  const PointBatch Z = sample_measure(law.base(), n, splitmix64(seed) ^ 0x2ULL);
  return std::sqrt(lambda) * X + std::sqrt(1.0 - lambda) * Z;
}

double log_density_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x) {
  check_lambda(lambda);
  if (x.size() != law.dim() || !x.allFinite()) throw DomainError("log_density: invalid point");
  if (auto v = law.closed_form_log_density(lambda, x)) return *v;
  if (lambda == 0.0 && law.base().smooth()) return -law.base().value(x);
  if (lambda == 1.0 && law.target().smooth()) return -law.target().value(x);
  throw UnsupportedOperation("log_density: no closed form for " + law.target().family_name() + " / " +
                             law.base().family_name() + "; use score or hessian estimators");
}

double log_density(const InterpolationLaw& law, double t, const Vector& x) {
  return log_density_at_lambda(law, law.lambda_at(t), x);
}

ScoreEstimate snis_score(const InterpolationLaw& law, double lambda, const Vector& x, const SnisConfig& cfg) {
  const int d = law.dim();
  const Particles p = propose(law, lambda, x, cfg.particles, cfg.seed, cfg.swapped, cfg.ess_fraction);
  const bool wform = cfg.form != HessianForm::u_form;
  const Potential& pot = wform ? law.base() : law.target();
  if (!pot.smooth()) throw UnsupportedOperation("snis score: " + pot.family_name() + " has no gradient");
  const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
  const int n = cfg.particles;
  Accumulator acc(cfg.blocks, d, 0);
  for (int i = 0; i < n; ++i) {
    const Vector y = p.y.row(i).transpose();
    const Vector g = wform ? pot.gradient(Vector((x - y) / s1l)) : pot.gradient(Vector(y / sl));
    acc.add(block_of(i, n, cfg.blocks), p.w[i], g);
  }
  const double scale = wform ? -1.0 / s1l : -1.0 / sl;
  auto est = [scale](double, const Vector& m1, const Matrix&) { return Matrix(scale * m1); };
  auto jk = jackknife(acc, est);
  return {jk.value.col(0), jk.std_error.col(0), "snis", p.ess};
}

ScoreEstimate score_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x, const SnisConfig& cfg) {
  check_lambda(lambda);
  const int d = law.dim();
  if (x.size() != d || !x.allFinite()) throw DomainError("score: invalid point");
  Vector out(d);
  if (law.closed_form_score(lambda, x, out)) return {out, Vector::Zero(d), "closed_form", 0.0};
  if (lambda == 0.0 || lambda == 1.0) {
    const Potential& p = lambda == 0.0 ? law.base() : law.target();
    if (!p.smooth()) throw UnsupportedOperation("score: endpoint family " + p.family_name() + " is not smooth");
    return {-p.gradient(x), Vector::Zero(d), "closed_form", 0.0};
  }
  return snis_score(law, lambda, x, cfg);
}

ScoreEstimate score(const InterpolationLaw& law, double t, const Vector& x, const SnisConfig& cfg) {
  return score_at_lambda(law, law.lambda_at(t), x, cfg);
}

namespace {

struct FormResult {
  Matrix value;
  Matrix std_error;
};

FormResult snis_hessian_form(const InterpolationLaw& law, double lambda, const Vector& x, const Particles& p,
                             HessianForm form, int blocks) {
  const int d = law.dim();
  const int n = static_cast<int>(p.w.size());
  const double sl = std::sqrt(lambda), s1l = std::sqrt(1.0 - lambda);
  const bool need_w = form != HessianForm::u_form;
  const bool need_u = form != HessianForm::w_form;
  if (need_w && !law.base().smooth())
    throw UnsupportedOperation("snis hessian: base " + law.base().family_name() + " is not smooth");
  if (need_u && !law.target().smooth())
    throw UnsupportedOperation("snis hessian: target " + law.target().family_name() + " is not smooth");

  if (form == HessianForm::mixed) {
    Accumulator acc(blocks, 2 * d, 2 * d);
    Vector f(2 * d);
    for (int i = 0; i < n; ++i) {
      const Vector y = p.y.row(i).transpose();
      f.head(d) = law.base().gradient(Vector((x - y) / s1l));
      f.tail(d) = law.target().gradient(Vector(y / sl));
      acc.add(block_of(i, n, blocks), p.w[i], f);
    }
    const double scale = 1.0 / std::sqrt(lambda * (1.0 - lambda));
    auto est = [d, scale](double, const Vector& m1, const Matrix& m2) {
      Matrix cov = m2.topRightCorner(d, d) - m1.head(d) * m1.tail(d).transpose();
      return Matrix(scale * 0.5 * (cov + cov.transpose()));
    };
    auto jk = jackknife(acc, est);
    return {jk.value, jk.std_error};
  }
  const bool wform = form == HessianForm::w_form;
  const Potential& pot = wform ? law.base() : law.target();
  Accumulator acc(blocks, d + d * d, d);
  Vector f(d + d * d);
  for (int i = 0; i < n; ++i) {
    const Vector y = p.y.row(i).transpose();
    const PotentialEval e = pot.eval(wform ? Vector((x - y) / s1l) : Vector(y / sl));
    f.head(d) = e.gradient;
    f.tail(d * d) = Eigen::Map<const Vector>(e.hessian.data(), d * d);
    acc.add(block_of(i, n, blocks), p.w[i], f);
  }
  const double scale = wform ? 1.0 / (1.0 - lambda) : 1.0 / lambda;
  auto est = [d, scale](double, const Vector& m1, const Matrix& m2) {
    Matrix mean_h = Eigen::Map<const Matrix>(m1.tail(d * d).data(), d, d);
    Matrix cov = m2 - m1.head(d) * m1.head(d).transpose();
    return Matrix(scale * (-mean_h + cov));
  };
  auto jk = jackknife(acc, est);
  return {jk.value, jk.std_error};
}

}  // namespace

HessianEstimate snis_hessian(const InterpolationLaw& law, double lambda, const Vector& x, const SnisConfig& cfg) {
  const Particles p = propose(law, lambda, x, cfg.particles, cfg.seed, cfg.swapped, cfg.ess_fraction);
  HessianEstimate h;
  FormResult main = snis_hessian_form(law, lambda, x, p, cfg.form, cfg.blocks);
  h.value = main.value;
  h.std_error = main.std_error;
  h.estimator = "snis";
  h.form = cfg.form;
  h.ess = p.ess;
  if (cfg.cross_check) {
    FormResult other = snis_hessian_form(law, lambda, x, p, cfg.check_form, cfg.blocks);
    h.discrepancy = (main.value - other.value).cwiseAbs().maxCoeff();
    h.check_value = other.value;
    h.check_std_error = other.std_error;
  }
  return h;
}

HessianEstimate hessian_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x,
                                  const SnisConfig& cfg) {
  check_lambda(lambda);
  const int d = law.dim();
  if (x.size() != d || !x.allFinite()) throw DomainError("hessian: invalid point");
  HessianEstimate h;
  h.estimator = "closed_form";
  h.form = cfg.form;
  if (auto m = law.closed_form_hessian(lambda, x)) {
    h.value = *m;
  } else if (lambda == 0.0) {
    h.value = delegate_hessian(law.base(), x);
  } else if (lambda == 1.0) {
    h.value = delegate_hessian(law.target(), x);
  } else {
    return snis_hessian(law, lambda, x, cfg);
  }
  h.std_error = Matrix::Zero(d, d);
  return h;
}

HessianEstimate hessian_log_density(const InterpolationLaw& law, double t, const Vector& x, const SnisConfig& cfg) {
  return hessian_at_lambda(law, law.lambda_at(t), x, cfg);
}

WeightedBatch conditional_sample_at_lambda(const InterpolationLaw& law, double lambda, const Vector& x, int n,
                                           std::uint64_t seed, bool swapped) {
  check_lambda(lambda);
  Particles p = propose(law, lambda, x, n, seed, swapped, SnisConfig{}.ess_fraction);
  WeightedBatch out;
  out.points = std::move(p.y);
  out.weights = Eigen::Map<const Vector>(p.w.data(), n);
  out.weights /= out.weights.sum();
  out.ess = p.ess;
  return out;
}

WeightedBatch conditional_sample(const InterpolationLaw& law, double t, const Vector& x, int n, std::uint64_t seed,
                                 bool swapped) {
  return conditional_sample_at_lambda(law, law.lambda_at(t), x, n, seed, swapped);
}

}  // namespace annealed
