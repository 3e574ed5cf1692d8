#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fairsim: exposure-fairness simulator for dynamic recommendation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool force = false;
  bool resume = false;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a simulation from a config file");
  run_cmd->add_option("--config", config_path, "Config file path")->required();
  run_cmd->add_option("--set", overrides, "Override a config key (key=value), repeatable");
  run_cmd->add_flag("--force", force, "Overwrite an existing run directory");
  run_cmd->add_flag("--resume", resume, "Continue a partially completed run");

  std::vector<std::string> run_dirs;
  std::string merged_csv = "compare.csv";
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Merge completed runs and print a summary table");
  compare_cmd->add_option("run_dirs", run_dirs, "Run directories")->expected(-1);
  compare_cmd->add_option("--out", merged_csv, "Merged per-round CSV path (empty to skip)")
      ->capture_default_str();

  std::string inspect_dir;
  int inspect_round = 1;
  CLI::App* inspect_cmd = app.add_subcommand("inspect", "Show one round of a run in detail");
  inspect_cmd->add_option("run_dir", inspect_dir, "Run directory")->required();
  inspect_cmd->add_option("--round", inspect_round, "Round number (1-based)")->required();

  std::string dataset_path;
  std::string dataset_format = "movielens-delimited";
  std::string separator = "::";
  CLI::App* stats_cmd = app.add_subcommand("dataset-stats", "Print a dataset load report");
  stats_cmd->add_option("dataset", dataset_path, "Dataset file")->required();
  stats_cmd->add_option("--format", dataset_format, "movielens-delimited or csv")
      ->capture_default_str();
  stats_cmd->add_option("--separator", separator, "Field separator for delimited files")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed())
    return fairsim::cmd_run(config_path, overrides, force, resume, std::cout, std::cerr);
  if (compare_cmd->parsed())
    return fairsim::cmd_compare(run_dirs, merged_csv, std::cout, std::cerr);
  if (inspect_cmd->parsed())
    return fairsim::cmd_inspect(inspect_dir, inspect_round, std::cout, std::cerr);
  if (stats_cmd->parsed())
    return fairsim::cmd_dataset_stats(dataset_path, dataset_format, separator, std::cout,
                                      std::cerr);
  return 2;
}
