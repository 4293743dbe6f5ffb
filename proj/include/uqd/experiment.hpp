#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqd/metrics.hpp"
#include "uqd/scheduler.hpp"
#include "uqd/tasks.hpp"

namespace uqd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairSpec {
  AlgorithmConfig algorithm;
  std::string task_name;
};

struct ExperimentConfig {
  std::vector<PairSpec> pairs;
  std::vector<std::uint64_t> seeds;
  std::size_t sampling_size = 1024;
  std::size_t generations = 100;
  std::vector<std::size_t> grid_dims = {16, 16};
  std::filesystem::path output_dir = "runs";
  std::size_t workers = 1;
  Aggregator aggregator = Aggregator::Mean;
  GroundTruthSource truth;
};

// Accepts a preset name or an explicit operator block; unknown keys are
// configuration errors.
AlgorithmConfig algorithm_from_json(const nlohmann::json& j);
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Relative output directories resolve against $UQD_OUTPUT_ROOT when set.
std::filesystem::path resolve_output_dir(const std::filesystem::path& configured);

struct CellOutcome {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string task;
  std::string status = "ok";  // "undefined" when the budget rules out the cell
  double corrected_qd_score = 0.0;
  double illusory_qd_score = 0.0;
  double coverage = 0.0;
  double average_samples = 0.0;
  std::size_t evals_total = 0;
  std::size_t max_samples = 0;
  std::size_t clamped_cells = 0;
};

// Executes every (pair, seed) cell: writes one directory per cell with
// per_generation.csv plus illusory and corrected archive snapshots, then the
// aggregate metrics.csv at the experiment root. A cell whose budget is
// exceeded is reported with status "undefined"; the experiment continues.
std::vector<CellOutcome> run_experiment(const ExperimentConfig& config, std::ostream& log);

// Loads a snapshot, rebuilds the corrected archive against analytic or
// empirical ground truth, writes the corrected snapshot, returns the score.
double correct_snapshot(const std::filesystem::path& input,
                        std::optional<std::size_t> empirical_reevals,
                        std::optional<std::filesystem::path> output, std::ostream& log);

std::string preset_table();

}  // namespace uqd
