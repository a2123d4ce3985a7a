#include "annealed/diagnostics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <ostream>

#include "annealed/errors.hpp"

namespace annealed {
namespace {

constexpr int kReferenceSample = 100000;
constexpr int kMinSamples = 100;

Matrix spd_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

void fit(const PointBatch& x, Vector& mean, Matrix& cov) {
  const Eigen::Index n = x.rows();
  mean = x.colwise().mean().transpose();
  const Matrix c = x.rowwise() - mean.transpose();
  cov = (c.transpose() * c) / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
}

EmpiricalReport base_report(const PointBatch& samples, const Vector& ref_mean, const Matrix& ref_cov) {
  if (samples.rows() < kMinSamples) throw DomainError("empirical_report: need at least 100 samples");
  if (samples.cols() != ref_mean.size()) throw DomainError("empirical_report: dimension mismatch");
  EmpiricalReport r;
  r.samples = static_cast<int>(samples.rows());
  r.dim = static_cast<int>(samples.cols());
  fit(samples, r.mean, r.covariance);
  r.mean_se = (r.covariance.diagonal() / static_cast<double>(r.samples)).cwiseSqrt();
  r.reference_mean = ref_mean;
  r.reference_covariance = ref_cov;
  if (!ref_cov.allFinite()) {
    r.flags.push_back("reference covariance is not finite");
    return r;
  }
  try {
    const GaussianDivergences g = gaussian_divergences(ref_mean, ref_cov, r.mean, r.covariance);
    r.kl_gaussianized = g.kl;
    r.w2_gaussian = std::sqrt(std::max(g.w2_sq, 0.0));
    r.pinsker = std::sqrt(2.0 * g.kl);
  } catch (const DomainError& e) {
    r.flags.push_back(std::string("singular covariance: ") + e.what());
  }
  if (r.dim == 1 && r.covariance(0, 0) > 0.0 && ref_cov(0, 0) > 0.0)
    r.tv_fits_1d = gaussian_l1_distance_1d(r.mean(0), r.covariance(0, 0), ref_mean(0), ref_cov(0, 0));
  return r;
}

// Sorted coupling of samples against a reference quantile function.
template <class Quantile>
double sorted_w2(const PointBatch& samples, Quantile q) {
  std::vector<double> xs(samples.data(), samples.data() + samples.rows());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double diff = xs[i] - q((i + 0.5) / n);
    acc += diff * diff;
  }
  return std::sqrt(acc / n);
}

double empirical_quantile(const std::vector<double>& sorted, double u) {
  const double pos = std::clamp(u * sorted.size() - 0.5, 0.0, sorted.size() - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double f = pos - lo;
  return (1.0 - f) * sorted[lo] + f * sorted[hi];
}

double sorted_w2_against(const PointBatch& samples, const PointBatch& reference) {
  std::vector<double> ref(reference.data(), reference.data() + reference.rows());
  std::sort(ref.begin(), ref.end());
  return sorted_w2(samples, [&](double u) { return empirical_quantile(ref, u); });
}

void exact_reference(const InterpolationLaw& law, double lambda, Vector& mean, Matrix& cov) {
  const MomentSummary mp = moments(law.target());
  const MomentSummary mn = moments(law.base());
  mean = std::sqrt(lambda) * mp.mean + std::sqrt(1.0 - lambda) * mn.mean;
  cov = lambda * mp.covariance + (1.0 - lambda) * mn.covariance;
}

std::optional<double> lsi_bound(const InterpolationLaw& law, double kappa) {
  if (!std::holds_alternative<QuadraticPiecewise>(law.schedule().params())) return std::nullopt;
  if (!law.base().is<GaussianFamily>()) return std::nullopt;
  ConvolvedCase c;
  c.kappa = kappa;
  c.sigma2 = law.base().as<GaussianFamily>().variance;
  c.T = law.schedule().horizon();
  c.dim = law.dim();
  const Potential& t = law.target();
  if (t.is<GaussianFamily>()) {
    c.tau2 = t.as<GaussianFamily>().variance;
  } else if (t.is<CompactGaussianConvolutionFamily>()) {
    c.tau2 = t.as<CompactGaussianConvolutionFamily>().smoothing_variance;
    c.radius = t.as<CompactGaussianConvolutionFamily>().radius;
  } else {
    return std::nullopt;
  }
  try {
    return lsi_proposition_bounds(c).constant("bound");
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

}  // namespace

GaussianDivergences gaussian_divergences(const Vector& m1, const Matrix& s1, const Vector& m2, const Matrix& s2) {
  const Eigen::Index d = m1.size();
  if (m2.size() != d || s1.rows() != d || s1.cols() != d || s2.rows() != d || s2.cols() != d)
    throw DomainError("gaussian_divergences: dimension mismatch");
  Eigen::LLT<Matrix> l1(s1), l2(s2);
  if (l1.info() != Eigen::Success || l2.info() != Eigen::Success)
    throw DomainError("gaussian_divergences: covariance is not positive definite");
  auto logdet = [](const Eigen::LLT<Matrix>& l) {
    return 2.0 * l.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  const Vector dm = m2 - m1;
  const double tr = l2.solve(s1).trace();
  const double quad = dm.dot(l2.solve(dm));
  GaussianDivergences g;
  g.kl = 0.5 * (tr + quad - static_cast<double>(d) + logdet(l2) - logdet(l1));
  const Matrix r2 = spd_sqrt(s2);
  const Matrix cross = spd_sqrt(r2 * s1 * r2);
  g.w2_sq = dm.squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross.trace();
  return g;
}

double gaussian_l1_distance_1d(double m1, double v1, double m2, double v2) {
  if (!(v1 > 0.0 && v2 > 0.0)) throw DomainError("gaussian_l1_distance_1d: variances must be positive");
  const boost::math::normal n1(m1, std::sqrt(v1)), n2(m2, std::sqrt(v2));
  // log p1 - log p2 = a x^2 + b x + c
  const double a = 0.5 / v2 - 0.5 / v1;
  const double b = m1 / v1 - m2 / v2;
  const double c = 0.5 * m2 * m2 / v2 - 0.5 * m1 * m1 / v1 + 0.5 * std::log(v2 / v1);
  std::vector<double> roots;
  if (std::abs(a) < 1e-300) {
    if (b == 0.0) return 0.0;
    roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc > 0.0) {
      const double s = std::sqrt(disc);
      const double q = -0.5 * (b + std::copysign(s, b));
      roots.push_back(q / a);
      if (q != 0.0) roots.push_back(c / q);
    } else if (disc == 0.0) {
      roots.push_back(-b / (2.0 * a));
    }
  }
  std::sort(roots.begin(), roots.end());
  // Sum |F1 - F2| differences over the intervals between crossings.
  std::vector<double> edges;
  edges.push_back(-kInf);
  edges.insert(edges.end(), roots.begin(), roots.end());
  edges.push_back(kInf);
  auto diff_cdf = [&](double x) {
    if (std::isinf(x)) return 0.0;
    return boost::math::cdf(n1, x) - boost::math::cdf(n2, x);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) total += std::abs(diff_cdf(edges[i + 1]) - diff_cdf(edges[i]));
  return total;
}

nlohmann::json EmpiricalReport::to_json() const {
  auto vec = [](const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real_json(v(i)));
    return a;
  };
  auto mat = [&](const Matrix& m) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
    return a;
  };
  auto opt = [](const std::optional<double>& v) { return v ? real_json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["samples"] = samples;
  j["dim"] = dim;
  j["mean"] = vec(mean);
  j["mean_se"] = vec(mean_se);
  j["covariance"] = mat(covariance);
  j["reference_mean"] = vec(reference_mean);
  j["reference_covariance"] = mat(reference_covariance);
  j["kl_gaussianized"] = opt(kl_gaussianized);
  j["kl_is_proxy"] = true;
  j["w2_gaussian"] = opt(w2_gaussian);
  j["w2_exact_1d"] = opt(w2_exact_1d);
  j["tv_fits_1d"] = opt(tv_fits_1d);
  j["pinsker"] = opt(pinsker);
  j["flags"] = flags;
  return j;
}

EmpiricalReport empirical_report(const PointBatch& samples, const Potential& reference, std::uint64_t seed) {
  const MomentSummary m = moments(reference);
  EmpiricalReport r = base_report(samples, m.mean, m.covariance);
  if (r.dim != 1) return r;
  if (reference.is<GaussianFamily>()) {
    const boost::math::normal g(0.0, std::sqrt(reference.as<GaussianFamily>().variance));
    r.w2_exact_1d = sorted_w2(samples, [&](double u) { return boost::math::quantile(g, u); });
  } else {
    r.w2_exact_1d = sorted_w2_against(samples, sample_measure(reference, kReferenceSample, seed));
    r.flags.push_back("w2_exact_1d uses a reference sample");
  }
  return r;
}

EmpiricalReport empirical_report(const PointBatch& samples, const PointBatch& reference) {
  if (reference.rows() < 2) throw DomainError("empirical_report: need at least two reference points");
  Vector m;
  Matrix c;
  fit(reference, m, c);
  EmpiricalReport r = base_report(samples, m, c);
  if (r.dim == 1) r.w2_exact_1d = sorted_w2_against(samples, reference);
  return r;
}

StudyResult bias_scaling_study(const StudyConfig& cfg) {
  if (cfg.kappas.size() < 3) throw DomainError("bias_scaling_study: need at least three kappa values");
  for (double k : cfg.kappas)
    if (!(k > 0.0 && k < 0.5)) throw DomainError("kappa must lie in (0, 1/2) for study mode");
  if (!(cfg.h > 0.0)) throw DomainError("bias_scaling_study: h must be positive");
  if (cfg.chains < kMinSamples) throw DomainError("bias_scaling_study: need at least 100 chains");

  const InterpolationLaw& law = cfg.law;
  const double T = law.schedule().horizon();
  StudyResult res;
  try {
    const ActionSummary act = action_integrals(law.schedule(), moments(law.target()), moments(law.base()), cfg.quad);
    res.action_bound = act.action_bound;
  } catch (const Error& e) {
    res.notes.push_back(std::string("action: ") + e.what());
  }

  int successes = 0;
  for (std::size_t idx = 0; idx < cfg.kappas.size(); ++idx) {
    StudyRow row;
    row.kappa = cfg.kappas[idx];
    try {
      const int n0 = static_cast<int>(std::ceil(T / (row.kappa * cfg.h)));
      const double eps = cfg.eps_end.value_or(default_eps_end(law, row.kappa, n0));
      row.steps = std::max(1, static_cast<int>(std::ceil((T - eps) / (row.kappa * cfg.h) - 1e-9)));
      auto run_at = [&](int steps, std::uint64_t salt) {
        SdeRun run{law, row.kappa, steps, cfg.chains, splitmix64(cfg.seed ^ salt), eps, {}, cfg.snis};
        const TrajectoryBatch b = run_annealed(run);
        Vector m;
        Matrix c;
        exact_reference(law, law.lambda_at(b.end_time), m, c);
        const EmpiricalReport rep = base_report(b.terminal, m, c);
        if (!rep.kl_gaussianized) throw NumericalError("bias_scaling_study: gaussianized KL unavailable");
        return *rep.kl_gaussianized;
      };
      row.raw_bias = run_at(row.steps, 2 * idx + 1);
      row.raw_bias_half = run_at(2 * row.steps, 2 * idx + 2);
      row.floor = std::abs(row.raw_bias - row.raw_bias_half);
      row.floor_adjusted_bias = std::max(0.0, row.raw_bias_half - row.floor);
      row.bound_thm_annealed = std::isnan(res.action_bound) ? kNaN : kl_bias_bound(res.action_bound, row.kappa);
      row.bound_lsi = lsi_bound(law, row.kappa).value_or(kNaN);
      row.ok = true;
      ++successes;
    } catch (const Error& e) {
      row.error = e.what();
    }
    res.rows.push_back(row);
  }
  if (successes < 3) {
    std::string msg = "bias_scaling_study: fewer than three kappa runs succeeded";
    for (const auto& r : res.rows)
      if (!r.ok) msg += "; kappa " + format_real(r.kappa) + ": " + r.error;
    throw StudyError(msg);
  }

  std::vector<double> xs, ys;
  for (auto& r : res.rows) {
    if (r.ok && r.floor_adjusted_bias > 0.0) {
      r.in_fit = true;
      xs.push_back(std::log(r.kappa));
      ys.push_back(std::log(r.floor_adjusted_bias));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    if (sxx > 0.0) {
      res.slope = sxy / sxx;
      res.intercept = my - res.slope * mx;
      for (auto& r : res.rows)
        if (r.in_fit) r.residual = std::log(r.floor_adjusted_bias) - (res.intercept + res.slope * std::log(r.kappa));
    }
  } else {
    res.notes.push_back("slope not fitted: fewer than two positive floor-adjusted biases");
  }
  return res;
}

nlohmann::json StudyResult::to_json() const {
  nlohmann::json j;
  j["slope"] = real_json(slope);
  j["intercept"] = real_json(intercept);
  j["action_bound"] = real_json(action_bound);
  j["notes"] = notes;
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json x;
    x["kappa"] = real_json(r.kappa);
    x["steps"] = r.steps;
    x["raw_bias"] = real_json(r.raw_bias);
    x["raw_bias_half"] = real_json(r.raw_bias_half);
    x["floor"] = real_json(r.floor);
    x["floor_adjusted_bias"] = real_json(r.floor_adjusted_bias);
    x["bound_thm_annealed"] = real_json(r.bound_thm_annealed);
    x["bound_lsi"] = real_json(r.bound_lsi);
    x["ok"] = r.ok;
    x["in_fit"] = r.in_fit;
    x["residual"] = real_json(r.residual);
    if (!r.error.empty()) x["error"] = r.error;
    rows_j.push_back(x);
  }
  j["rows"] = rows_j;
  return j;
}

void write_study_csv(std::ostream& os, const StudyResult& r) {
  os << "kappa,raw_bias,floor_adjusted_bias,bound_thm_annealed,bound_lsi,slope_fit_flag\n";
  for (const auto& row : r.rows)
    os << format_real(row.kappa) << ',' << format_real(row.raw_bias) << ',' << format_real(row.floor_adjusted_bias)
       << ',' << format_real(row.bound_thm_annealed) << ',' << format_real(row.bound_lsi) << ','
       << (row.in_fit ? 1 : 0) << '\n';
}

}  // namespace annealed
