#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "annealed/errors.hpp"
#include "annealed_cli/config.hpp"
#include "annealed_cli/runner.hpp"
#include "doctest.h"

using namespace annealed;
using namespace annealed::cli;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_config() {
  return nlohmann::json::parse(R"({
    "seed": 3, "kappa": 0.2, "modes": ["bounds"],
    "law": {
      "target": {"family": "gaussian", "variance": 4.0, "dim": 1},
      "base": {"family": "gaussian", "variance": 1.0, "dim": 1},
      "schedule": {"family": "quadratic_piecewise", "T": 1.0}
    }
  })");
}

std::string schema_path(const nlohmann::json& j) {
  try {
    parse_config(j);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<none>";
}

fs::path config_dir() {
  const char* d = std::getenv("ANNEALED_CONFIG_DIR");
  return d ? fs::path(d) : fs::path("configs");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("schema errors name the offending field") {
  auto j = base_config();
  CHECK(schema_path(j) == "<none>");
  j["kappa"] = 0.7;
  j["modes"] = {"study"};
  CHECK(schema_path(j) == "kappa");
  try {
    parse_config(j);
  } catch (const SchemaError& e) {
    CHECK(e.detail() == "kappa must lie in (0, 1/2) for study mode");
  }
  j = base_config();
  j.erase("seed");
  CHECK(schema_path(j) == "seed");
  j = base_config();
  j["law"]["target"]["variance"] = -1.0;
  CHECK(schema_path(j) == "law.target.variance");
  j = base_config();
  j["modes"] = {"bounds", "dance"};
  CHECK(schema_path(j) == "modes[1]");
  j = base_config();
  j["bounds"] = {{"methods", {{{"method", "nope"}}}}};
  CHECK(schema_path(j).rfind("bounds.methods[0]", 0) == 0);
  j = base_config();
  j["sample"] = {{"snis_swapped", 1}};
  CHECK(schema_path(j) == "sample.snis_swapped");
}

TEST_CASE("study defaults and overrides") {
  auto j = base_config();
  const ExperimentConfig c = parse_config(j, {"study"});
  REQUIRE(c.study.kappas.size() == 3);
  CHECK(c.study.kappas[1] == doctest::Approx(0.1));
  CHECK(c.t_grid.size() == 9);
}

TEST_CASE("run_config is deterministic and exits 2 on schema errors") {
  const fs::path out = fs::temp_directory_path() / "annealed_cli_test";
  fs::remove_all(out);
  const fs::path cfg = out.string() + "_cfg.json";
  {
    std::ofstream f(cfg);
    f << base_config().dump();
  }
  std::ostringstream log, err;
  RunOptions o;
  o.config_path = cfg.string();
  o.out_dir = (out / "a").string();
  REQUIRE(run_config(o, log, err) == kOk);
  o.out_dir = (out / "b").string();
  REQUIRE(run_config(o, log, err) == kOk);
  for (const char* name : {"bounds.csv", "bounds.json", "manifest.json"})
    CHECK(slurp(out / "a" / name) == slurp(out / "b" / name));
  const auto manifest = nlohmann::json::parse(slurp(out / "a" / "manifest.json"));
  CHECK(manifest.at("seed") == 3);
  CHECK(manifest.at("files").size() == 2);

  RunOptions bad;
  bad.config_path = (config_dir() / "invalid_kappa.json").string();
  bad.out_dir = (out / "c").string();
  std::ostringstream e2;
  CHECK(run_config(bad, log, e2) == kSchemaError);
  CHECK(e2.str().find("kappa") != std::string::npos);
  bad.config_path = (out / "missing.json").string();
  CHECK(run_config(bad, log, e2) == kSchemaError);
  fs::remove_all(out);
  fs::remove(cfg);
}
