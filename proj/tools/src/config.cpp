#include "annealed_cli/config.hpp"

#include <algorithm>
#include <cmath>

#include "annealed/errors.hpp"
#include "annealed/json_util.hpp"

namespace annealed::cli {
namespace ju = json_util;
namespace {

template <class F>
auto section(const nlohmann::json& j, const std::string& key, F parse) {
  try {
    return parse(j.contains(key) ? j.at(key) : nlohmann::json::object());
  } catch (const SchemaError& e) {
    throw e.prefixed(key);
  }
}

int positive_int(const nlohmann::json& j, const std::string& key, int fallback) {
  const long long v = ju::integer_or(j, key, fallback);
  ju::require(v >= 1 && v <= 100000000, key, "must be a positive integer");
  return static_cast<int>(v);
}

std::vector<double> numbers_or(const nlohmann::json& j, const std::string& key, std::vector<double> fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return ju::numbers(j, key);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"score_sup", "hessian_band", "gaussian_compact_band",
                                          "conditional_poincare", "lyapunov", "wellposedness",
                                          "lsi_convolved"};
  return m;
}

SampleSection parse_sample(const nlohmann::json& j) {
  SampleSection s;
  s.steps = positive_int(j, "steps", s.steps);
  s.chains = positive_int(j, "chains", s.chains);
  if (j.contains("eps_end")) {
    const double e = ju::number(j, "eps_end");
    ju::require(e >= 0.0 && std::isfinite(e), "eps_end", "must be nonnegative");
    s.eps_end = e;
  }
  s.snapshot_times = numbers_or(j, "snapshot_times", {});
  s.snis.particles = positive_int(j, "snis_particles", s.snis.particles);
  if (j.contains("snis_swapped")) {
    ju::require(j.at("snis_swapped").is_boolean(), "snis_swapped", "expected a boolean");
    s.snis.swapped = j.at("snis_swapped").get<bool>();
  }
  return s;
}

StudySection parse_study(const nlohmann::json& j, double kappa) {
  StudySection s;
  s.kappas = numbers_or(j, "kappas", {kappa, kappa / 2.0, kappa / 4.0});
  ju::require(s.kappas.size() >= 3, "kappas", "need at least three values");
  for (std::size_t i = 0; i < s.kappas.size(); ++i)
    ju::require(s.kappas[i] > 0.0 && s.kappas[i] < 0.5, "kappas[" + std::to_string(i) + "]",
                "kappa must lie in (0, 1/2) for study mode");
  s.h = ju::number_or(j, "h", s.h);
  ju::require(s.h > 0.0 && std::isfinite(s.h), "h", "must be positive");
  s.chains = positive_int(j, "chains", s.chains);
  ju::require(s.chains >= 100, "chains", "need at least 100 chains");
  return s;
}

VerifySection parse_verify(const nlohmann::json& j) {
  VerifySection v;
  v.profile_points = positive_int(j, "profile_points", v.profile_points);
  v.r_max = ju::number_or(j, "r_max", v.r_max);
  ju::require(v.r_max > 0.0 && std::isfinite(v.r_max), "r_max", "must be positive");
  v.band_points = positive_int(j, "band_points", v.band_points);
  v.oracle_t = numbers_or(j, "oracle_t", {});
  v.oracle_x = numbers_or(j, "oracle_x", {});
  return v;
}

OracleSection parse_oracle(const nlohmann::json& j, double T) {
  OracleSection o;
  o.t = numbers_or(j, "t", {0.25 * T, 0.5 * T, 0.75 * T});
  o.x = numbers_or(j, "x", {-2.0, 0.0, 2.0});
  o.nodes = positive_int(j, "nodes", o.nodes);
  ju::require(o.nodes >= 16, "nodes", "need at least 16 nodes");
  for (std::size_t i = 0; i < o.t.size(); ++i)
    ju::require(o.t[i] > 0.0 && o.t[i] < T, "t[" + std::to_string(i) + "]", "must lie in (0, T)");
  return o;
}

std::vector<BoundRequest> parse_bounds(const nlohmann::json& j) {
  std::vector<BoundRequest> out;
  if (!j.contains("methods")) {
    for (const char* m : {"score_sup", "hessian_band", "wellposedness"}) out.push_back({m, nlohmann::json::object()});
    return out;
  }
  const auto& arr = j.at("methods");
  ju::require(arr.is_array(), "methods", "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string key = "methods[" + std::to_string(i) + "]";
    try {
      BoundRequest r;
      r.method = ju::string(arr[i], "method");
      ju::require(contains(known_methods(), r.method), "method", "unknown bound method '" + r.method + "'");
      r.params = arr[i];
      out.push_back(std::move(r));
    } catch (const SchemaError& e) {
      throw e.prefixed(key);
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j, const std::vector<std::string>& modes_override) {
  ju::require(j.is_object(), "", "config must be a JSON object");
  ExperimentConfig c(j.dump(), section(j, "law", InterpolationLaw::from_json));
  const long long seed = ju::integer(j, "seed");
  ju::require(seed >= 0, "seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.kappa = ju::number(j, "kappa");
  ju::require(c.kappa > 0.0 && c.kappa < 1.0, "kappa", "must lie in (0, 1)");
  if (j.contains("output_dir")) c.output_dir = ju::string(j, "output_dir");

  if (!modes_override.empty()) {
    c.modes = modes_override;
  } else if (j.contains("modes")) {
    const auto& m = j.at("modes");
    ju::require(m.is_array() && !m.empty(), "modes", "expected a nonempty array of mode names");
    for (std::size_t i = 0; i < m.size(); ++i) {
      ju::require(m[i].is_string(), "modes[" + std::to_string(i) + "]", "expected a string");
      c.modes.push_back(m[i].get<std::string>());
    }
  } else {
    c.modes = {"bounds", "sample", "study"};
  }
  for (std::size_t i = 0; i < c.modes.size(); ++i)
    ju::require(contains(known_modes(), c.modes[i]), "modes[" + std::to_string(i) + "]",
                "unknown mode '" + c.modes[i] + "'");

  const double T = c.law.schedule().horizon();
  c.t_grid = section(j, "bounds", [&](const nlohmann::json& b) {
    auto grid = numbers_or(b, "t_grid", {});
    if (grid.empty()) {
      const int n = positive_int(b, "t_points", 9);
      for (int i = 1; i <= n; ++i) grid.push_back(T * i / (n + 1.0));
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
      ju::require(grid[i] >= 0.0 && grid[i] <= T, "t_grid[" + std::to_string(i) + "]", "must lie in [0, T]");
    return grid;
  });
  c.bounds = section(j, "bounds", parse_bounds);
  c.sample = section(j, "sample", parse_sample);
  c.verify = section(j, "verify", parse_verify);
  if (contains(c.modes, "study")) {
    ju::require(c.kappa < 0.5, "kappa", "kappa must lie in (0, 1/2) for study mode");
    c.study = section(j, "study", [&](const nlohmann::json& s) { return parse_study(s, c.kappa); });
  }
  if (contains(c.modes, "oracle"))
    c.oracle = section(j, "oracle", [&](const nlohmann::json& o) { return parse_oracle(o, T); });
  return c;
}

}  // namespace annealed::cli
