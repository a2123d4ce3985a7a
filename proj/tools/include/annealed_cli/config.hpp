#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "annealed/bounds.hpp"
#include "annealed/interpolation.hpp"
#include "json.hpp"

namespace annealed::cli {

struct BoundRequest {
  std::string method;  // score_sup, hessian_band, gaussian_compact_band, conditional_poincare,
                       // lyapunov, wellposedness, lsi_convolved
  nlohmann::json params;
};

struct SampleSection {
  int steps = 200;
  int chains = 1000;
  std::optional<double> eps_end;
  std::vector<double> snapshot_times;
  SnisConfig snis;
};

struct StudySection {
  std::vector<double> kappas;
  double h = 0.02;
  int chains = 2000;
};

struct VerifySection {
  int profile_points = 2000;
  double r_max = 20.0;
  int band_points = 50;
  std::vector<double> oracle_t;  // d = 1 only
  std::vector<double> oracle_x;
};

struct OracleSection {
  std::vector<double> t;
  std::vector<double> x;
  int nodes = 800;
};

struct ExperimentConfig {
  ExperimentConfig(std::string canonical_json, InterpolationLaw l)
      : canonical(std::move(canonical_json)), law(std::move(l)) {}

  std::string canonical;  // compact dump of the parsed JSON, hashed into the manifest
  InterpolationLaw law;
  double kappa = 0.1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::vector<std::string> modes;
  std::vector<double> t_grid;
  std::vector<BoundRequest> bounds;
  SampleSection sample;
  StudySection study;
  VerifySection verify;
  OracleSection oracle;
};

inline const std::vector<std::string>& known_modes() {
  static const std::vector<std::string> m{"bounds", "sample", "verify", "study", "oracle"};
  return m;
}

// Validates the whole document for the modes that will run. Throws SchemaError.
// modes_override replaces the config's "modes" list when non-empty.
ExperimentConfig parse_config(const nlohmann::json& j, const std::vector<std::string>& modes_override = {});

}  // namespace annealed::cli
