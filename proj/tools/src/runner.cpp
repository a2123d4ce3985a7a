#include "annealed_cli/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "annealed/diagnostics.hpp"
#include "annealed/errors.hpp"
#include "annealed/json_util.hpp"
#include "annealed/oracle.hpp"
#include "annealed/sampler.hpp"

namespace annealed::cli {
namespace {

constexpr PoincareMethod kAllMethods[] = {PoincareMethod::mutual_convexity, PoincareMethod::miclo,
                                          PoincareMethod::reflection, PoincareMethod::convex_infinity,
                                          PoincareMethod::direct};

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

BoundReport failed(const std::string& theorem, const std::string& why) {
  BoundReport r;
  r.theorem = theorem;
  r.notes.push_back(why);
  return r;
}

PoincareMethod poincare_method(const std::string& s) {
  for (PoincareMethod m : kAllMethods)
    if (to_string(m) == s) return m;
  throw SchemaError("variant", "unknown conditional_poincare variant '" + s + "'");
}

ConvexVariant convex_variant(const std::string& s) {
  for (ConvexVariant v : {ConvexVariant::none, ConvexVariant::klartag, ConvexVariant::radial, ConvexVariant::strict})
    if (to_string(v) == s) return v;
  throw SchemaError("variant", "unknown lyapunov variant '" + s + "'");
}

BandStructure band_structure(const std::string& s) {
  if (s == "generic") return BandStructure::generic;
  if (s == "strictly_convex") return BandStructure::strictly_convex;
  if (s == "gaussian") return BandStructure::gaussian;
  if (s == "product") return BandStructure::product;
  throw SchemaError("structure", "unknown band structure '" + s + "'");
}

std::optional<double> opt_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return json_util::number(j, key);
}

BoundReport band_report(const std::string& theorem, const HessianBand& b) {
  BoundReport r;
  r.theorem = theorem;
  r.set("lower", b.lower);
  r.set("upper", b.upper);
  r.set("lipschitz", b.lipschitz);
  r.set("bound", std::max(std::abs(b.lower), std::abs(b.upper)));
  if (!b.upper_branch.empty()) r.notes.push_back("upper from " + b.upper_branch);
  r.applies = std::isfinite(b.lower) && std::isfinite(b.upper);
  return r;
}

// Exact band when the base is Gaussian and the target Gaussian, uniform on a
// ball, or a ball convolved with a Gaussian.
std::optional<HessianBand> structural_band(const InterpolationLaw& law, double lambda) {
  if (!law.base().is<GaussianFamily>()) return std::nullopt;
  const double s2 = law.base().as<GaussianFamily>().variance;
  const Potential& t = law.target();
  if (t.is<GaussianFamily>()) return gaussian_compact_band(s2, t.as<GaussianFamily>().variance, 0.0, lambda, law.dim());
  if (t.is<UniformBallFamily>())
    return gaussian_compact_band(s2, 0.0, t.as<UniformBallFamily>().radius, lambda, law.dim());
  if (t.is<CompactGaussianConvolutionFamily>()) {
    const auto& c = t.as<CompactGaussianConvolutionFamily>();
    return gaussian_compact_band(s2, c.smoothing_variance, c.radius, lambda, law.dim());
  }
  return std::nullopt;
}

struct Profiles {
  SmoothnessProfile W, U;
};

Profiles profiles(const InterpolationLaw& law) { return {known_profile(law.base()), known_profile(law.target())}; }

// Smallest applicable conditional Poincare bound, used when the band needs C_P.
std::optional<std::pair<double, std::string>> best_conditional_poincare(const Profiles& p, double lambda, int dim) {
  ConditionalPoincareParams params;
  params.dim = dim;
  params.base_poincare = p.W.poincare_constant;
  std::optional<std::pair<double, std::string>> best;
  for (PoincareMethod m : kAllMethods) {
    try {
      const BoundReport r = conditional_poincare(m, p.W, p.U, lambda, params);
      if (r.applies && (!best || r.value() < best->first)) best = std::pair{r.value(), to_string(m)};
    } catch (const Error&) {
    }
  }
  return best;
}

std::vector<BoundReport> per_t_reports(const ExperimentConfig& c, const Profiles& p, const BoundRequest& req,
                                       double lambda) {
  const InterpolationLaw& law = c.law;
  const auto& q = req.params;
  if (req.method == "score_sup") return {score_sup_bound(p.W, p.U, lambda)};
  if (req.method == "hessian_band") {
    const std::string s = q.contains("structure") ? json_util::string(q, "structure") : "generic";
    std::vector<double> vars;
    if (q.contains("product_variances")) vars = json_util::numbers(q, "product_variances");
    std::optional<double> cp = opt_number(q, "poincare");
    std::string source;
    if (!cp) {
      if (auto best = best_conditional_poincare(p, lambda, law.dim())) {
        cp = best->first;
        source = "C_P from conditional_poincare." + best->second;
      }
    }
    BoundReport r =
        band_report("hessian_band." + s, hessian_band(p.W, p.U, lambda, cp, band_structure(s), vars));
    if (!source.empty()) r.notes.push_back(source);
    return {r};
  }
  if (req.method == "gaussian_compact_band") {
    auto b = structural_band(law, lambda);
    if (!b) return {failed("gaussian_compact_band", "needs a Gaussian base and a Gaussian or compact target")};
    return {band_report("gaussian_compact_band", *b)};
  }
  if (req.method == "conditional_poincare") {
    ConditionalPoincareParams params;
    params.dim = law.dim();
    params.base_poincare = opt_number(q, "base_poincare");
    if (!params.base_poincare) params.base_poincare = p.W.poincare_constant;
    params.epsilon = opt_number(q, "epsilon");
    std::vector<PoincareMethod> methods;
    if (q.contains("variant")) methods.push_back(poincare_method(json_util::string(q, "variant")));
    else methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
    std::vector<BoundReport> out;
    for (PoincareMethod m : methods) out.push_back(conditional_poincare(m, p.W, p.U, lambda, params));
    return out;
  }
  if (req.method == "lyapunov") {
    const ConvexVariant v = q.contains("variant") ? convex_variant(json_util::string(q, "variant")) : ConvexVariant::none;
    auto problem = lyapunov_problem(law.base(), law.target(), v);
    if (!problem) return {failed("conditional_rescale", "base potential is not quasi-convex")};
    if (q.contains("c_klar")) problem->c_klar = json_util::number(q, "c_klar");
    return {conditional_rescale(*problem, lambda, p.U.grad_sup)};
  }
  return {};
}

BoundReport global_report(const ExperimentConfig& c, const BoundRequest& req) {
  const InterpolationLaw& law = c.law;
  const double T = law.schedule().horizon();
  if (req.method == "wellposedness") {
    std::vector<double> eps = req.params.contains("eps") ? json_util::numbers(req.params, "eps")
                                                         : std::vector<double>{T / 100.0, T / 10.0};
    return wellposedness_report(law, c.kappa, eps);
  }
  // lsi_convolved
  if (!std::holds_alternative<QuadraticPiecewise>(law.schedule().params()) || !law.base().is<GaussianFamily>())
    return failed("lsi_proposition.convolved", "needs the quadratic schedule and a Gaussian base");
  ConvolvedCase cc;
  cc.kappa = c.kappa;
  cc.sigma2 = law.base().as<GaussianFamily>().variance;
  cc.T = T;
  cc.dim = law.dim();
  if (law.target().is<GaussianFamily>()) {
    cc.tau2 = law.target().as<GaussianFamily>().variance;
  } else if (law.target().is<CompactGaussianConvolutionFamily>()) {
    cc.tau2 = law.target().as<CompactGaussianConvolutionFamily>().smoothing_variance;
    cc.radius = law.target().as<CompactGaussianConvolutionFamily>().radius;
  } else {
    return failed("lsi_proposition.convolved", "needs a Gaussian or compact-convolution target");
  }
  return lsi_proposition_bounds(cc);
}

std::string write_csv(const std::function<void(std::ostream&)>& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

}  // namespace

bool run_bounds(const ExperimentConfig& c, Artifacts& out) {
  const Profiles p = profiles(c.law);
  std::string csv = bound_csv_header() + "\n";
  nlohmann::json js = nlohmann::json::array();
  auto emit = [&](double t, double lambda, const std::string& method, const BoundReport& r) {
    csv += bound_csv_row(t, lambda, r) + "\n";
    js.push_back({{"t", real_json(t)}, {"lambda", real_json(lambda)}, {"method", method}, {"report", r.to_json()}});
  };
  for (double t : c.t_grid) {
    const double lambda = c.law.lambda_at(t);
    for (const auto& req : c.bounds) {
      if (req.method == "wellposedness" || req.method == "lsi_convolved") continue;
      std::vector<BoundReport> reps;
      try {
        reps = per_t_reports(c, p, req, lambda);
      } catch (const SchemaError& e) {
        throw e;
      } catch (const Error& e) {
        reps = {failed(req.method, e.what())};
      }
      for (const auto& r : reps) emit(t, lambda, req.method, r);
    }
  }
  const double T = c.law.schedule().horizon();
  for (const auto& req : c.bounds) {
    if (req.method != "wellposedness" && req.method != "lsi_convolved") continue;
    BoundReport r;
    try {
      r = global_report(c, req);
    } catch (const SchemaError& e) {
      throw e;
    } catch (const Error& e) {
      r = failed(req.method, e.what());
    }
    emit(T, c.law.schedule().lambdaT(), req.method, r);
  }
  out["bounds.csv"] = csv;
  out["bounds.json"] = json_text(js);
  return true;
}

bool run_sample(const ExperimentConfig& c, Artifacts& out) {
  SdeRun run{c.law, c.kappa, c.sample.steps, c.sample.chains, c.seed, c.sample.eps_end, c.sample.snapshot_times,
             c.sample.snis};
  const TrajectoryBatch b = run_annealed(run);
  out["terminal.csv"] = write_csv([&](std::ostream& os) { write_terminal_csv(os, b); });
  if (!b.snapshots.empty()) out["snapshots.csv"] = write_csv([&](std::ostream& os) { write_snapshots_csv(os, b); });

  nlohmann::json j;
  j["kappa"] = real_json(c.kappa);
  j["steps"] = c.sample.steps;
  j["chains"] = c.sample.chains;
  j["seed"] = c.seed;
  j["step_size"] = real_json(b.step_size);
  j["eps_end"] = real_json(b.eps_end);
  j["end_time"] = real_json(b.end_time);
  long calls = 0;
  double min_ess = kInf;
  for (const auto& s : b.stats) {
    calls += s.snis_calls;
    if (s.snis_calls > 0) min_ess = std::min(min_ess, s.min_ess);
  }
  j["snis_calls"] = calls;
  j["snis_min_ess"] = calls > 0 ? real_json(min_ess) : nlohmann::json(nullptr);
  if (b.terminal.rows() >= 100) {
    const double lambda = c.law.lambda_at(b.end_time);
    EmpiricalReport rep = lambda >= 1.0 ? empirical_report(b.terminal, c.law.target(), c.seed)
                                        : empirical_report(b.terminal, sample_interpolant(c.law, b.end_time, 100000,
                                                                                          splitmix64(c.seed) ^ 3));
    j["diagnostics"] = rep.to_json();
  }
  out["sample.json"] = json_text(j);
  return true;
}

bool run_verify(const ExperimentConfig& c, Artifacts& out) {
  const InterpolationLaw& law = c.law;
  const int d = law.dim();
  const Profiles p = profiles(law);
  nlohmann::json j;
  bool ok = true;

  nlohmann::json prof = nlohmann::json::array();
  const PointBatch grid = canonical_radial_grid(d, c.verify.profile_points, c.verify.r_max);
  for (const auto& [role, pot, sp] : {std::tuple{"base", &law.base(), &p.W}, std::tuple{"target", &law.target(), &p.U}}) {
    if (!pot->smooth()) {
      prof.push_back({{"role", role}, {"skipped", "potential is not smooth"}});
      continue;
    }
    const VerificationReport rep = verify_profile(*pot, *sp, grid);
    for (const auto& ch : rep.checks) {
      prof.push_back({{"role", role},
                      {"check", ch.name},
                      {"passed", ch.passed},
                      {"worst", real_json(ch.worst_value)},
                      {"declared", real_json(ch.declared)}});
      ok = ok && ch.passed;
    }
  }
  j["profile"] = prof;

  // Hessian band at random (t, x).
  nlohmann::json band = nlohmann::json::object();
  const double T = law.schedule().horizon();
  int violations = 0, checked = 0;
  std::string skipped;
  Rng rng(c.seed, 7);
  for (int i = 0; i < c.verify.band_points && skipped.empty(); ++i) {
    const double t = T * (0.05 + 0.9 * rng.uniform());
    const double lambda = law.lambda_at(t);
    const Vector x = sample_interpolant(law, t, 1, splitmix64(c.seed + static_cast<std::uint64_t>(i))).row(0).transpose();
    if (!law.closed_form_log_density(lambda, x)) {
      skipped = "no closed-form log-density";
      break;
    }
    HessianBand hb;
    try {
      auto s = structural_band(law, lambda);
      hb = s ? *s : hessian_band(p.W, p.U, lambda);
    } catch (const Error& e) {
      skipped = e.what();
      break;
    }
    const MatrixEstimate h = fd_hessian([&](const Vector& y) { return log_density_at_lambda(law, lambda, y); }, x,
                                        1e-3 * (1.0 + x.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h.value + h.value.transpose()));
    const double err = h.error.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double e = es.eigenvalues()(k);
      const double tol = 10.0 * err + 1e-6 * (1.0 + std::abs(e));
      if (e < hb.lower - tol || e > hb.upper + tol) ++violations;
    }
    ++checked;
  }
  band["points"] = checked;
  band["violations"] = violations;
  if (!skipped.empty()) band["skipped"] = skipped;
  ok = ok && violations == 0;
  j["hessian_band"] = band;

  // Conditional Poincare bounds against the 1D oracle.
  if (d == 1) {
    const std::vector<double> ts =
        c.verify.oracle_t.empty() ? std::vector<double>{0.25 * T, 0.5 * T, 0.75 * T} : c.verify.oracle_t;
    const std::vector<double> xs = c.verify.oracle_x.empty() ? std::vector<double>{-1.0, 0.0, 1.0} : c.verify.oracle_x;
    nlohmann::json rows = nlohmann::json::array();
    int bad = 0;
    ConditionalPoincareParams params;
    params.base_poincare = p.W.poincare_constant;
    for (double t : ts) {
      const double lambda = law.lambda_at(t);
      if (!(lambda > 0.0 && lambda < 1.0)) continue;
      for (double x : xs) {
        const PoincareResult o = conditional_poincare_oracle(law, lambda, x);
        for (PoincareMethod m : kAllMethods) {
          const BoundReport r = conditional_poincare(m, p.W, p.U, lambda, params);
          if (!r.applies) continue;
          const bool pass = r.value() >= 0.99 * o.c_p;
          bad += pass ? 0 : 1;
          rows.push_back({{"t", real_json(t)},
                          {"x", real_json(x)},
                          {"method", to_string(m)},
                          {"bound", real_json(r.value())},
                          {"oracle", real_json(o.c_p)},
                          {"passed", pass}});
        }
      }
    }
    j["oracle_dominance"] = {{"rows", rows}, {"violations", bad}};
    ok = ok && bad == 0;
  }
  j["passed"] = ok;
  out["verify.json"] = json_text(j);
  return ok;
}

bool run_study(const ExperimentConfig& c, Artifacts& out) {
  StudyConfig cfg{c.law, c.study.kappas, c.study.h, c.study.chains, c.seed, c.sample.eps_end, c.sample.snis, {}};
  const StudyResult r = bias_scaling_study(cfg);
  out["study.csv"] = write_csv([&](std::ostream& os) { write_study_csv(os, r); });
  out["study.json"] = json_text(r.to_json());
  return true;
}

bool run_oracle(const ExperimentConfig& c, Artifacts& out) {
  if (c.law.dim() != 1) throw DomainError("oracle mode needs a one-dimensional law");
  std::string csv = "t,lambda,x,c_p,c_p_coarse,refinement,truncated\n";
  for (double t : c.oracle.t) {
    const double lambda = c.law.lambda_at(t);
    if (!(lambda > 0.0 && lambda < 1.0)) continue;
    for (double x : c.oracle.x) {
      const PoincareResult o = conditional_poincare_oracle(c.law, lambda, x, c.oracle.nodes);
      csv += format_real(t) + "," + format_real(lambda) + "," + format_real(x) + "," + format_real(o.c_p) + "," +
             format_real(o.c_p_coarse) + "," + format_real(o.refinement) + "," + (o.truncated ? "1" : "0") + "\n";
    }
  }
  out["oracle.csv"] = csv;
  return true;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string manifest_json(const ExperimentConfig& c, const Artifacts& files) {
  nlohmann::json j;
  j["config_sha256"] = sha256_hex(c.canonical);
  j["seed"] = c.seed;
  j["modes"] = c.modes;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [name, bytes] : files)
    list.push_back({{"name", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
  j["files"] = list;
  return json_text(j);
}

namespace {

int run_checked(const RunOptions& opts, std::ostream& log, std::ostream& err) {
  ExperimentConfig cfg = [&]() -> ExperimentConfig {
    std::ifstream in(opts.config_path);
    if (!in) throw SchemaError("", "cannot open config file '" + opts.config_path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j, opts.modes);
  }();
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;

  Artifacts files;
  bool ok = true;
  for (const auto& mode : known_modes()) {
    if (std::find(cfg.modes.begin(), cfg.modes.end(), mode) == cfg.modes.end()) continue;
    bool mode_ok = true;
    try {
      if (mode == "bounds") mode_ok = run_bounds(cfg, files);
      else if (mode == "sample") mode_ok = run_sample(cfg, files);
      else if (mode == "verify") mode_ok = run_verify(cfg, files);
      else if (mode == "study") mode_ok = run_study(cfg, files);
      else mode_ok = run_oracle(cfg, files);
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      err << mode << ": " << e.what() << "\n";
      return kRuntimeError;
    }
    log << mode << ": " << (mode_ok ? "ok" : "checks failed") << "\n";
    ok = ok && mode_ok;
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    err << "output: cannot create '" << cfg.output_dir << "': " << ec.message() << "\n";
    return kRuntimeError;
  }
  files["manifest.json"] = manifest_json(cfg, files);
  for (const auto& [name, bytes] : files) {
    std::ofstream f(fs::path(cfg.output_dir) / name, std::ios::binary);
    f << bytes;
    if (!f) {
      err << "output: cannot write '" << name << "'\n";
      return kRuntimeError;
    }
  }
  log << "wrote " << files.size() << " files to " << cfg.output_dir << "\n";
  return ok ? kOk : kRuntimeError;
}

}  // namespace

int run_config(const RunOptions& opts, std::ostream& log, std::ostream& err) {
  try {
    return run_checked(opts, log, err);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchemaError;
  }
}

}  // namespace annealed::cli
