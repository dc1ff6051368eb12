#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "laxhopf/errors.hpp"
#include "laxhopf/scenario.hpp"

namespace sc = laxhopf::scenario;

int main(int argc, char** argv) {
  CLI::App app{"Lax-Hopf value functions for intertemporal optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string axis;
  std::vector<double> values;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "artifact directory")->capture_default_str();
    sub->add_option("--seed", seed, "overrides solver.seed");
    sub->add_option("--threads", threads, "worker threads (default: LAXHOPF_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "evaluate a scenario and write its artifacts");
  auto* sweep = app.add_subcommand("sweep", "run once per value of a numeric config field");
  auto* verify = app.add_subcommand("verify", "compare the formula against the DP oracle");
  auto* conj = app.add_subcommand("conjugate", "dump the conjugate of the cost on a dual lattice");
  auto* mod = app.add_subcommand("moderate", "dump a moderation table");
  for (auto* s : {run, sweep, verify, conj, mod}) common(s);
  sweep->add_option("--axis", axis, "dotted config path, e.g. x.0 or rate.params.0")->required();
  sweep->add_option("--values", values, "values to substitute")->expected(0, -1);

  CLI11_PARSE(app, argc, argv);

  sc::Options opts;
  opts.out_dir = out_dir;
  opts.seed = seed;
  opts.threads = threads;

  sc::Json config;
  try {
    config = sc::load_config(config_path);
  } catch (const laxhopf::ConfigError& e) {
    std::cerr << "config error at " << e.what() << '\n';
    return sc::kExitConfig;
  }

  sc::Outcome outcome;
  if (*run)
    outcome = sc::run(config, opts);
  else if (*sweep)
    outcome = sc::sweep(config, axis, values, opts);
  else if (*verify)
    outcome = sc::verify(config, opts);
  else if (*conj)
    outcome = sc::conjugate(config, opts);
  else
    outcome = sc::moderate(config, opts);

  (outcome.exit_code == sc::kExitConfig || outcome.exit_code == sc::kExitFailure ? std::cerr : std::cout)
      << outcome.summary << '\n';
  return outcome.exit_code;
}
