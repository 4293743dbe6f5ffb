#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uqd/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Uncertain quality-diversity optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::size_t> workers_override;
  auto* run_cmd = app.add_subcommand("run", "Execute an experiment config");
  run_cmd->add_option("config", config_path, "JSON experiment config")->required();
  run_cmd->add_option("--workers", workers_override, "Evaluation worker threads");

  std::string snapshot_path;
  std::optional<std::size_t> empirical;
  std::optional<std::string> output_path;
  auto* correct_cmd = app.add_subcommand("correct", "Correct an archive snapshot");
  correct_cmd->add_option("snapshot", snapshot_path, "Archive snapshot JSON")->required();
  correct_cmd->add_option("--empirical", empirical,
                          "Use the median of K fresh evaluations instead of analytic truth");
  correct_cmd->add_option("--output", output_path, "Corrected snapshot path");

  auto* presets_cmd = app.add_subcommand("presets", "List the algorithm presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      uqd::ExperimentConfig config = uqd::load_experiment_config(config_path);
      if (workers_override.has_value()) config.workers = *workers_override;
      uqd::run_experiment(config, std::cout);
      return 0;
    }
    if (correct_cmd->parsed()) {
      std::optional<std::filesystem::path> out;
      if (output_path.has_value()) out = *output_path;
      uqd::correct_snapshot(snapshot_path, empirical, out, std::cout);
      return 0;
    }
    if (presets_cmd->parsed()) {
      std::cout << uqd::preset_table();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
