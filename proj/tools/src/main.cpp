#include <CLI11.hpp>
#include <iostream>

#include "annealed_cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace annealed::cli;
  CLI::App app{"annealed_lab: bounds, sampling and bias studies for annealed Langevin dynamics"};
  app.require_subcommand(1);
  RunOptions opts;
  std::string mode;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", opts.config_path, "Experiment config (JSON)")->required();
  run->add_option("--mode", mode, "Run a single mode")
      ->check(CLI::IsMember({"bounds", "sample", "verify", "study", "oracle"}));
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "Seed (overrides the config seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kSchemaError;
  }
  if (!mode.empty()) opts.modes = {mode};
  if (*out_opt) opts.out_dir = out_dir;
  if (*seed_opt) opts.seed = seed;

  try {
    return run_config(opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
