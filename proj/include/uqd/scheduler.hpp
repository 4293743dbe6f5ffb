#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqd/container.hpp"
#include "uqd/core.hpp"
#include "uqd/operators.hpp"
#include "uqd/tasks.hpp"

namespace uqd {

// Raised when a full-archive extraction cannot fit the per-generation budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmConfig {
  std::string name = "custom";
  std::size_t first_eval_samples = 1;  // N
  std::size_t reeval_samples = 0;      // 0 means same as first_eval_samples
  std::size_t depth = 1;
  AdditionPolicy addition;
  SelectionKind selection = SelectionKind::UniformTop;
  VariationParams variation;
  ExtractionParams extraction;

  std::size_t effective_reeval_samples() const {
    return reeval_samples == 0 ? first_eval_samples : reeval_samples;
  }
  void validate() const;
};

struct BudgetPlan {
  std::size_t offspring = 0;    // b
  std::size_t extractions = 0;  // E
};

// Splits the per-generation budget S into b offspring evaluated N times each
// and E extractions re-evaluated N_re times each. B = floor(S/N); rank
// weighted extraction takes E = min(floor(p*B), occupied); full-archive
// extraction takes everything or fails when the archive no longer fits.
BudgetPlan plan_budget(const AlgorithmConfig& config, std::size_t sampling_size,
                       std::size_t occupied_slot_count);

struct GenerationReport {
  std::size_t generation = 0;
  std::size_t evals_used = 0;
  std::size_t offspring = 0;
  std::size_t extracted = 0;
  std::size_t occupied_cells = 0;
  std::size_t occupied_slots = 0;
  double illusory_qd_score = 0.0;
  double average_samples = 0.0;  // NaN while the archive is empty
  std::size_t max_samples = 0;
};

struct RunParams {
  std::size_t sampling_size = 1024;  // S
  std::size_t generations = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  Aggregator aggregator = Aggregator::Mean;
};

struct RunResult {
  DepthGrid grid;
  std::vector<GenerationReport> reports;
  std::uint64_t seed = 0;
  std::size_t total_evals = 0;
};

// One generation: plan the budget, extract, select and vary parents,
// evaluate everything on per-slot rng substreams, then insert extracted
// elites and offspring together. An empty archive (generation 0, or after an
// exhaustive extraction) is reseeded with uniform random genotypes.
class Scheduler {
 public:
  Scheduler(AlgorithmConfig config, Task task, std::vector<std::size_t> grid_dims,
            RunParams params);

  void step();

  const AlgorithmConfig& config() const { return config_; }
  const Task& task() const { return task_; }
  const RunParams& params() const { return params_; }
  const DepthGrid& grid() const { return grid_; }
  const std::vector<GenerationReport>& reports() const { return reports_; }
  std::size_t generation() const { return generation_; }
  std::size_t total_evals() const { return total_evals_; }
  std::size_t pending_count() const { return pending_.size(); }

  RunResult finish() &&;

 private:
  struct EvalJob {
    SolutionRecord record;
    std::size_t samples = 0;
    bool from_grid = false;
  };

  std::vector<SolutionRecord> make_offspring(std::size_t count);
  void evaluate_jobs(std::vector<EvalJob>& jobs);

  AlgorithmConfig config_;
  Task task_;
  RunParams params_;
  DepthGrid grid_;
  std::deque<SolutionRecord> pending_;  // adaptive challenge buffer
  std::vector<GenerationReport> reports_;
  std::uint64_t next_id_ = 0;
  std::size_t generation_ = 0;
  std::size_t total_evals_ = 0;
};

RunResult run(const AlgorithmConfig& config, const Task& task,
              std::vector<std::size_t> grid_dims, const RunParams& params);

// Named algorithm presets: vanilla_me, me_sampling, archive_sampling,
// deep_grid, adapt_me, extract_me, me_reprod, me_weighted, me_low_spread,
// me_delta, as_weighted, as_delta.
AlgorithmConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace uqd
