#include "uqd/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "uqd/metrics.hpp"

namespace uqd {

void AlgorithmConfig::validate() const {
  if (first_eval_samples == 0) throw std::invalid_argument("first_eval_samples must be positive");
  if (depth == 0) throw std::invalid_argument("depth must be positive");
  addition.validate();
  if (extraction.proportion < 0.0 || extraction.proportion >= 1.0) {
    throw std::invalid_argument("extraction proportion must lie in [0, 1)");
  }
  if (extraction.kind == ExtractionKind::None && extraction.proportion != 0.0) {
    throw std::invalid_argument("extraction 'none' requires proportion 0");
  }
  if (extraction.kind == ExtractionKind::RankWeighted && extraction.base <= 1.0) {
    throw std::invalid_argument("extraction base must exceed 1");
  }
  if (variation.kind == VariationKind::IsoLine &&
      (variation.sigma_iso <= 0.0 || variation.sigma_line <= 0.0)) {
    throw std::invalid_argument("iso-line sigmas must be positive");
  }
  if (variation.kind == VariationKind::Gaussian && variation.sigma <= 0.0) {
    throw std::invalid_argument("gaussian sigma must be positive");
  }
}

BudgetPlan plan_budget(const AlgorithmConfig& config, std::size_t sampling_size,
                       std::size_t occupied_slot_count) {
  const std::size_t n = config.first_eval_samples;
  const std::size_t n_re = config.effective_reeval_samples();
  if (sampling_size < n) {
    throw std::invalid_argument("sampling size below first-eval samples");
  }
  const std::size_t batch = sampling_size / n;

  switch (config.extraction.kind) {
    case ExtractionKind::None:
    case ExtractionKind::AdaptiveChallenge:
      return {batch, 0};
    case ExtractionKind::RankWeighted: {
      const auto cap = static_cast<std::size_t>(config.extraction.proportion *
                                                static_cast<double>(batch));
      const std::size_t extractions = std::min(cap, occupied_slot_count);
      const std::size_t offspring = (sampling_size - extractions * n_re) / n;
      return {offspring, extractions};
    }
    case ExtractionKind::FullArchive: {
      if (occupied_slot_count * n_re > sampling_size - n) {
        throw BudgetError("budget exceeded: archive too large for Archive-Sampling");
      }
      const std::size_t offspring = (sampling_size - occupied_slot_count * n_re) / n;
      return {offspring, occupied_slot_count};
    }
  }
  throw std::logic_error("unhandled extraction kind");
}

Scheduler::Scheduler(AlgorithmConfig config, Task task, std::vector<std::size_t> grid_dims,
                     RunParams params)
    : config_(std::move(config)),
      task_(std::move(task)),
      params_(params),
      grid_(GridSpec{std::move(grid_dims), {}, config_.depth}, config_.addition) {
  config_.validate();
  if (grid_.spec().dims.size() != task_.descriptor_dim) {
    throw std::invalid_argument("grid dimensionality must match task descriptor");
  }
  if (params_.sampling_size < config_.first_eval_samples) {
    throw std::invalid_argument("sampling size below first-eval samples");
  }
}

std::vector<SolutionRecord> Scheduler::make_offspring(std::size_t count) {
  std::vector<SolutionRecord> offspring;
  offspring.reserve(count);
  if (count == 0) return offspring;

  if (grid_.empty()) {
    for (std::size_t j = 0; j < count; ++j) {
      rng::Stream stream(params_.seed, generation_, j, rng::Purpose::Init);
      SolutionRecord record;
      record.id = next_id_++;
      record.birth_generation = generation_;
      record.genotype.resize(task_.genotype_dim);
      for (double& x : record.genotype) x = stream.uniform01();
      offspring.push_back(std::move(record));
    }
    return offspring;
  }

  const std::size_t arity = config_.variation.arity();
  rng::Stream select_stream(params_.seed, generation_, 0, rng::Purpose::Select);
  const auto picks = config_.selection == SelectionKind::UniformTop
                         ? select_uniform_top(grid_, count * arity, select_stream)
                         : select_fitness_proportional_depth(grid_, count * arity, select_stream);

  for (std::size_t j = 0; j < count; ++j) {
    rng::Stream stream(params_.seed, generation_, j, rng::Purpose::Variation);
    SolutionRecord record;
    record.id = next_id_++;
    record.birth_generation = generation_;
    record.parent_id = picks[j * arity].source_id;
    if (config_.variation.kind == VariationKind::IsoLine) {
      record.genotype =
          variation_iso_line(picks[j * arity].genotype, picks[j * arity + 1].genotype,
                             config_.variation.sigma_iso, config_.variation.sigma_line, stream);
    } else {
      record.genotype =
          variation_gaussian(picks[j * arity].genotype, config_.variation.sigma, stream);
    }
    offspring.push_back(std::move(record));
  }
  return offspring;
}

void Scheduler::evaluate_jobs(std::vector<EvalJob>& jobs) {
  const auto evaluate_one = [&](std::size_t slot) {
    EvalJob& job = jobs[slot];
    rng::Stream stream(params_.seed, generation_, slot, rng::Purpose::Eval);
    std::vector<EvalSample> samples;
    samples.reserve(job.samples);
    for (std::size_t s = 0; s < job.samples; ++s) {
      samples.push_back(task_.evaluate(job.record.genotype, stream));
    }
    job.record.absorb(samples, params_.aggregator);
  };

  const std::size_t workers = std::max<std::size_t>(1, params_.workers);
  if (workers == 1 || jobs.size() < 2) {
    for (std::size_t i = 0; i < jobs.size(); ++i) evaluate_one(i);
    return;
  }

  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= jobs.size()) break;
        evaluate_one(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void Scheduler::step() {
  const std::size_t sampling_size = params_.sampling_size;
  const std::size_t n = config_.first_eval_samples;
  const std::size_t n_re = config_.effective_reeval_samples();

  std::vector<EvalJob> jobs;  // extracted elites first, then offspring
  std::vector<SolutionRecord> offspring;

  switch (config_.extraction.kind) {
    case ExtractionKind::None: {
      const auto plan = plan_budget(config_, sampling_size, grid_.occupied_slot_count());
      offspring = make_offspring(plan.offspring);
      break;
    }
    case ExtractionKind::RankWeighted: {
      const auto plan = plan_budget(config_, sampling_size, grid_.occupied_slot_count());
      rng::Stream stream(params_.seed, generation_, 0, rng::Purpose::Extract);
      for (auto& record :
           extract_rank_weighted(grid_, plan.extractions, config_.extraction.base, stream)) {
        jobs.push_back({std::move(record), n_re, true});
      }
      offspring = make_offspring(plan.offspring);
      break;
    }
    case ExtractionKind::FullArchive: {
      const auto plan = plan_budget(config_, sampling_size, grid_.occupied_slot_count());
      // Parents are picked before the extraction empties the grid.
      offspring = make_offspring(plan.offspring);
      for (auto& record : extract_full_archive(grid_)) {
        jobs.push_back({std::move(record), n_re, true});
      }
      break;
    }
    case ExtractionKind::AdaptiveChallenge: {
      auto outcome = resolve_adaptive_challenges(grid_, pending_, sampling_size / n_re);
      for (auto& item : outcome.to_reevaluate) {
        jobs.push_back({std::move(item.record), n_re, item.from_grid});
      }
      offspring = make_offspring((sampling_size - jobs.size() * n_re) / n);
      break;
    }
  }

  const std::size_t extracted_count = jobs.size();
  const std::size_t offspring_count = offspring.size();
  for (auto& record : offspring) {
    jobs.push_back({std::move(record), n, false});
  }

  std::size_t evals_used = 0;
  for (const auto& job : jobs) evals_used += job.samples;
  if (evals_used > sampling_size) throw std::logic_error("internal budget overrun");

  evaluate_jobs(jobs);

  for (auto& job : jobs) {
    if (config_.extraction.kind == ExtractionKind::AdaptiveChallenge && !job.from_grid) {
      // New offspring only claim empty cells outright; occupied cells are
      // contested through the pending buffer next generation.
      const std::size_t cell = grid_.bin(job.record.estimates.descriptor);
      if (grid_.exposed_elite(cell) == nullptr) {
        grid_.insert(std::move(job.record));
      } else {
        pending_.push_back(std::move(job.record));
      }
    } else {
      grid_.insert(std::move(job.record));
    }
  }

  total_evals_ += evals_used;

  GenerationReport report;
  report.generation = generation_;
  report.evals_used = evals_used;
  report.offspring = offspring_count;
  report.extracted = extracted_count;
  report.occupied_cells = grid_.occupied_cell_count();
  report.occupied_slots = grid_.occupied_slot_count();
  const auto top = grid_.top_layer();
  report.illusory_qd_score = qd_score(top, task_.fitness_bounds).value;
  report.average_samples = average_samples(top);
  for (const auto& cell : grid_.cells()) {
    for (const auto& slot : cell.slots) {
      report.max_samples = std::max(report.max_samples, slot.estimates.eval_count);
    }
  }
  reports_.push_back(report);
  ++generation_;
}

RunResult Scheduler::finish() && {
  return {std::move(grid_), std::move(reports_), params_.seed, total_evals_};
}

RunResult run(const AlgorithmConfig& config, const Task& task,
              std::vector<std::size_t> grid_dims, const RunParams& params) {
  if (params.generations == 0) throw std::invalid_argument("generations must be positive");
  Scheduler scheduler(config, task, std::move(grid_dims), params);
  for (std::size_t g = 0; g < params.generations; ++g) scheduler.step();
  return std::move(scheduler).finish();
}

AlgorithmConfig preset(const std::string& name) {
  AlgorithmConfig config;
  config.name = name;

  if (name == "vanilla_me") {
    config.first_eval_samples = 1;
    config.depth = 1;
    return config;
  }
  if (name == "me_sampling") {
    config.first_eval_samples = 32;
    config.depth = 1;
    return config;
  }
  if (name == "archive_sampling") {
    config.first_eval_samples = 2;
    config.depth = 2;
    config.extraction.kind = ExtractionKind::FullArchive;
    return config;
  }
  if (name == "deep_grid") {
    config.first_eval_samples = 1;
    config.depth = 32;
    config.addition.kind = AdditionKind::SeniorityFitness;
    config.selection = SelectionKind::FitnessProportionalDepth;
    return config;
  }
  if (name == "adapt_me") {
    config.first_eval_samples = 1;
    config.depth = 8;
    config.extraction.kind = ExtractionKind::AdaptiveChallenge;
    return config;
  }
  if (name == "extract_me") {
    config.first_eval_samples = 2;
    config.depth = 8;
    config.extraction.kind = ExtractionKind::RankWeighted;
    config.extraction.proportion = 0.25;
    config.extraction.base = 2.0;
    return config;
  }
  if (name == "me_reprod") {
    config.first_eval_samples = 32;
    config.depth = 1;
    config.addition.kind = AdditionKind::Reproducibility;
    return config;
  }
  if (name == "me_weighted") {
    config.first_eval_samples = 32;
    config.depth = 1;
    config.addition.kind = AdditionKind::Weighted;
    return config;
  }
  if (name == "me_low_spread") {
    config.first_eval_samples = 32;
    config.depth = 1;
    config.addition.kind = AdditionKind::ChallengeLowSpread;
    return config;
  }
  if (name == "me_delta") {
    config.first_eval_samples = 32;
    config.depth = 1;
    config.addition.kind = AdditionKind::ChallengeDelta;
    return config;
  }
  if (name == "as_weighted") {
    config.first_eval_samples = 2;
    config.depth = 2;
    config.addition.kind = AdditionKind::Weighted;
    config.extraction.kind = ExtractionKind::FullArchive;
    return config;
  }
  if (name == "as_delta") {
    // The delta gate holds a single incumbent per cell, so this variant runs
    // at depth 1 rather than the usual full-reevaluation depth 2.
    config.first_eval_samples = 2;
    config.depth = 1;
    config.addition.kind = AdditionKind::ChallengeDelta;
    config.extraction.kind = ExtractionKind::FullArchive;
    return config;
  }

  std::string known;
  for (const auto& p : preset_names()) {
    if (!known.empty()) known += ", ";
    known += p;
  }
  throw std::invalid_argument("unknown preset '" + name + "'; valid presets: " + known);
}

std::vector<std::string> preset_names() {
  return {"vanilla_me", "me_sampling", "archive_sampling", "deep_grid",
          "adapt_me",   "extract_me",  "me_reprod",        "me_weighted",
          "me_low_spread", "me_delta", "as_weighted",      "as_delta"};
}

}  // namespace uqd
