#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annealed_cli/config.hpp"

namespace annealed::cli {

enum ExitCode { kOk = 0, kRuntimeError = 1, kSchemaError = 2 };

struct RunOptions {
  std::string config_path;
  std::vector<std::string> modes;  // empty: modes from the config
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

// File name -> bytes, written in name order.
using Artifacts = std::map<std::string, std::string>;

// Returns false when a check failed; artifacts are produced either way.
bool run_bounds(const ExperimentConfig& c, Artifacts& out);
bool run_sample(const ExperimentConfig& c, Artifacts& out);
bool run_verify(const ExperimentConfig& c, Artifacts& out);
bool run_study(const ExperimentConfig& c, Artifacts& out);
bool run_oracle(const ExperimentConfig& c, Artifacts& out);

std::string sha256_hex(const std::string& data);
std::string manifest_json(const ExperimentConfig& c, const Artifacts& files);

// Parses, runs and writes artifacts plus manifest.json. Messages go to log/err.
// Schema errors are reported on err and return kSchemaError.
int run_config(const RunOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace annealed::cli
