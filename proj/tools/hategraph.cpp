#include <iostream>

#include <CLI11.hpp>

#include "hategraph/config.hpp"
#include "hategraph/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hategraph: n-gram-graph text classification experiment runner"};
  app.set_version_flag("--version", std::string("hategraph ") + hategraph::runner::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  hategraph::config::CliOverrides overrides;
  std::string out_flag, task_flag;
  uint64_t seed_flag = 0;
  int folds_flag = 0, jobs_flag = 0;

  CLI::App* run = app.add_subcommand("run", "run the experiment grid described by a config file");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  CLI::Option* opt_out = run->add_option("--out", out_flag, "output directory (overrides config)");
  CLI::Option* opt_seed = run->add_option("--seed", seed_flag, "random seed (overrides config)");
  CLI::Option* opt_folds =
      run->add_option("--folds", folds_flag, "cross-validation folds (overrides config)");
  CLI::Option* opt_jobs =
      run->add_option("--jobs", jobs_flag, "max concurrent grid cells (overrides config)");
  CLI::Option* opt_task = run->add_option(
      "--task", task_flag, "binary-combined | multiclass-rs | multiclass-hsol (overrides config)");

  CLI::App* validate =
      app.add_subcommand("validate", "validate a config file and echo the resolved configuration");
  validate->add_option("--config", config_path, "experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  if (*opt_out) overrides.out = out_flag;
  if (*opt_seed) overrides.seed = seed_flag;
  if (*opt_folds) overrides.folds = folds_flag;
  if (*opt_jobs) overrides.jobs = jobs_flag;
  if (*opt_task) overrides.task = task_flag;

  hategraph::config::ValidationResult validated =
      hategraph::config::validate_config(config_path, overrides);
  if (!validated.ok()) {
    std::cerr << "config invalid (" << validated.errors.size() << " error(s)):\n";
    for (const auto& e : validated.errors) std::cerr << "  " << e << '\n';
    return 2;
  }

  if (app.got_subcommand(validate)) {
    std::cout << hategraph::config::config_to_json(validated.config) << '\n';
    return 0;
  }
  return hategraph::runner::run_experiment(validated.config, std::cout);
}
