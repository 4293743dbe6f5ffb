#include "uqd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "uqd/serialize.hpp"

namespace uqd {

namespace {

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

AdditionPolicy addition_from_json(const nlohmann::json& j) {
  AdditionPolicy policy;
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "fitness") {
      policy.kind = AdditionKind::Fitness;
    } else if (text == "reproducibility") {
      policy.kind = AdditionKind::Reproducibility;
    } else if (text == "weighted") {
      policy.kind = AdditionKind::Weighted;
    } else if (text == "seniority_fitness") {
      policy.kind = AdditionKind::SeniorityFitness;
    } else if (text == "challenge_low_spread") {
      policy.kind = AdditionKind::ChallengeLowSpread;
    } else if (text == "challenge_delta") {
      policy.kind = AdditionKind::ChallengeDelta;
    } else {
      throw ConfigError("unknown addition policy: " + text);
    }
    return policy;
  }
  require_keys(j, {"kind", "weight_fitness", "weight_spread", "delta_fitness", "delta_spread"},
               "addition");
  policy = addition_from_json(j.at("kind"));
  policy.weight_fitness = j.value("weight_fitness", policy.weight_fitness);
  policy.weight_spread = j.value("weight_spread", policy.weight_spread);
  policy.delta_fitness = j.value("delta_fitness", policy.delta_fitness);
  policy.delta_spread = j.value("delta_spread", policy.delta_spread);
  return policy;
}

SelectionKind selection_from_json(const nlohmann::json& j) {
  const auto text = j.get<std::string>();
  if (text == "uniform_top") return SelectionKind::UniformTop;
  if (text == "fitness_proportional_depth") return SelectionKind::FitnessProportionalDepth;
  throw ConfigError("unknown selection: " + text);
}

VariationParams variation_from_json(const nlohmann::json& j) {
  VariationParams variation;
  require_keys(j, {"kind", "sigma_iso", "sigma_line", "sigma"}, "variation");
  const auto text = j.at("kind").get<std::string>();
  if (text == "iso_line") {
    variation.kind = VariationKind::IsoLine;
    variation.sigma_iso = j.value("sigma_iso", variation.sigma_iso);
    variation.sigma_line = j.value("sigma_line", variation.sigma_line);
  } else if (text == "gaussian") {
    variation.kind = VariationKind::Gaussian;
    variation.sigma = j.value("sigma", variation.sigma);
  } else {
    throw ConfigError("unknown variation: " + text);
  }
  return variation;
}

ExtractionParams extraction_from_json(const nlohmann::json& j) {
  ExtractionParams extraction;
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "none") {
      extraction.kind = ExtractionKind::None;
    } else if (text == "full_archive") {
      extraction.kind = ExtractionKind::FullArchive;
    } else if (text == "adaptive_challenge") {
      extraction.kind = ExtractionKind::AdaptiveChallenge;
    } else if (text == "rank_weighted") {
      throw ConfigError("rank_weighted extraction needs a proportion; use an object");
    } else {
      throw ConfigError("unknown extraction: " + text);
    }
    return extraction;
  }
  require_keys(j, {"kind", "proportion", "base"}, "extraction");
  const auto text = j.at("kind").get<std::string>();
  if (text != "rank_weighted") {
    extraction = extraction_from_json(j.at("kind"));
    return extraction;
  }
  extraction.kind = ExtractionKind::RankWeighted;
  extraction.proportion = j.at("proportion").get<double>();
  extraction.base = j.value("base", extraction.base);
  return extraction;
}

}  // namespace

AlgorithmConfig algorithm_from_json(const nlohmann::json& j) {
  if (j.is_string()) return preset(j.get<std::string>());

  require_keys(j,
               {"name", "samples", "reeval_samples", "depth", "addition", "selection",
                "variation", "extraction"},
               "algorithm");
  AlgorithmConfig config;
  config.name = j.value("name", std::string("custom"));
  config.first_eval_samples = j.value("samples", config.first_eval_samples);
  config.reeval_samples = j.value("reeval_samples", config.reeval_samples);
  config.depth = j.value("depth", config.depth);
  if (j.contains("addition")) config.addition = addition_from_json(j.at("addition"));
  if (j.contains("selection")) config.selection = selection_from_json(j.at("selection"));
  if (j.contains("variation")) config.variation = variation_from_json(j.at("variation"));
  if (j.contains("extraction")) config.extraction = extraction_from_json(j.at("extraction"));
  config.validate();
  return config;
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  require_keys(j,
               {"pairs", "seeds", "sampling_size", "generations", "grid", "output_dir",
                "workers", "aggregator", "ground_truth"},
               "config");
  ExperimentConfig config;

  if (!j.contains("pairs") || !j.at("pairs").is_array() || j.at("pairs").empty()) {
    throw ConfigError("config needs a non-empty 'pairs' array");
  }
  for (const auto& pair : j.at("pairs")) {
    require_keys(pair, {"algorithm", "task"}, "pair");
    PairSpec spec;
    spec.algorithm = algorithm_from_json(pair.at("algorithm"));
    spec.task_name = pair.at("task").get<std::string>();
    make_task(spec.task_name);  // validates the name up front
    config.pairs.push_back(std::move(spec));
  }

  if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty()) {
    throw ConfigError("config needs a non-empty 'seeds' array");
  }
  config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();

  config.sampling_size = j.value("sampling_size", config.sampling_size);
  config.generations = j.value("generations", config.generations);
  if (j.contains("grid")) config.grid_dims = j.at("grid").get<std::vector<std::size_t>>();
  if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
  config.workers = j.value("workers", config.workers);
  if (j.contains("aggregator")) {
    config.aggregator = aggregator_from_string(j.at("aggregator").get<std::string>());
  }
  if (j.contains("ground_truth")) {
    const auto& truth = j.at("ground_truth");
    if (truth.is_string() && truth.get<std::string>() == "analytic") {
      config.truth.kind = GroundTruthSource::Kind::Analytic;
    } else if (truth.is_object()) {
      require_keys(truth, {"empirical"}, "ground_truth");
      config.truth.kind = GroundTruthSource::Kind::Empirical;
      config.truth.reeval_count = truth.at("empirical").get<std::size_t>();
      if (config.truth.reeval_count == 0) throw ConfigError("empirical ground truth needs K >= 1");
    } else {
      throw ConfigError("ground_truth must be \"analytic\" or {\"empirical\": K}");
    }
  }
  if (config.sampling_size == 0) throw ConfigError("sampling_size must be positive");
  if (config.generations == 0) throw ConfigError("generations must be positive");
  if (config.workers == 0) throw ConfigError("workers must be positive");
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_from_json(j);
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& configured) {
  if (configured.is_absolute()) return configured;
  if (const char* root = std::getenv("UQD_OUTPUT_ROOT")) {
    return std::filesystem::path(root) / configured;
  }
  return configured;
}

namespace {

void write_per_generation_csv(const std::filesystem::path& path,
                              const std::vector<GenerationReport>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "generation,evals_used,offspring,extracted,occupied_cells,occupied_slots,"
         "illusory_qd_score,average_samples,max_samples\n";
  for (const auto& r : reports) {
    out << r.generation << ',' << r.evals_used << ',' << r.offspring << ',' << r.extracted << ','
        << r.occupied_cells << ',' << r.occupied_slots << ','
        << format_double(r.illusory_qd_score) << ',' << format_double(r.average_samples) << ','
        << r.max_samples << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<CellOutcome>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "run_id,seed,algorithm,task,generation,corrected_qd_score,illusory_qd_score,"
         "coverage,average_samples,evals_total,max_samples,clamped_cells,status\n";
  for (const auto& row : rows) {
    out << row.run_id << ',' << row.seed << ',' << row.algorithm << ',' << row.task << ",final,";
    if (row.status == "ok") {
      out << format_double(row.corrected_qd_score) << ',' << format_double(row.illusory_qd_score)
          << ',' << format_double(row.coverage) << ',' << format_double(row.average_samples)
          << ',' << row.evals_total << ',' << row.max_samples << ',' << row.clamped_cells;
    } else {
      out << ",,,," << row.evals_total << ",,";
    }
    out << ',' << row.status << '\n';
  }
}

}  // namespace

std::vector<CellOutcome> run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const auto root = resolve_output_dir(config.output_dir);
  std::filesystem::create_directories(root);

  std::vector<CellOutcome> rows;
  for (const auto& pair : config.pairs) {
    const Task task = make_task(pair.task_name);
    for (const std::uint64_t seed : config.seeds) {
      CellOutcome row;
      row.seed = seed;
      row.algorithm = pair.algorithm.name;
      row.task = pair.task_name;
      row.run_id = pair.algorithm.name + "_" + pair.task_name + "_" + std::to_string(seed);

      const auto cell_dir = root / row.run_id;
      std::filesystem::create_directories(cell_dir);

      RunParams params;
      params.sampling_size = config.sampling_size;
      params.generations = config.generations;
      params.seed = seed;
      params.workers = config.workers;
      params.aggregator = config.aggregator;

      Scheduler scheduler(pair.algorithm, task, config.grid_dims, params);
      try {
        for (std::size_t g = 0; g < config.generations; ++g) scheduler.step();
      } catch (const BudgetError& e) {
        row.status = "undefined";
        row.evals_total = scheduler.total_evals();
        write_per_generation_csv(cell_dir / "per_generation.csv", scheduler.reports());
        log << row.run_id << ": " << e.what() << " (status undefined)\n";
        rows.push_back(std::move(row));
        continue;
      }

      RunResult result = std::move(scheduler).finish();
      write_per_generation_csv(cell_dir / "per_generation.csv", result.reports);

      SnapshotMeta meta;
      meta.algorithm = pair.algorithm.name;
      meta.task = pair.task_name;
      meta.seed = seed;
      meta.sampling_size = config.sampling_size;
      meta.generations = config.generations;
      meta.aggregator = config.aggregator;
      meta.fitness_bounds = task.fitness_bounds;
      save_json(cell_dir / "archive.json", archive_to_json(result.grid, meta));

      const auto top = result.grid.top_layer();
      DepthGrid corrected =
          build_corrected_archive(top, config.truth, task, result.grid.spec(), seed);
      SnapshotMeta corrected_meta = meta;
      corrected_meta.kind = "corrected";
      save_json(cell_dir / "archive_corrected.json", archive_to_json(corrected, corrected_meta));

      const QdScore illusory = qd_score(top, task.fitness_bounds);
      const QdScore corrected_score = qd_score(corrected, task.fitness_bounds);
      row.corrected_qd_score = corrected_score.value;
      row.illusory_qd_score = illusory.value;
      row.coverage = coverage(result.grid);
      row.average_samples = average_samples(top);
      row.evals_total = result.total_evals;
      row.max_samples = result.reports.empty() ? 0 : result.reports.back().max_samples;
      row.clamped_cells = illusory.clamped + corrected_score.clamped;

      log << row.run_id << ": corrected_qd_score=" << format_double(row.corrected_qd_score)
          << " illusory_qd_score=" << format_double(row.illusory_qd_score)
          << " coverage=" << format_double(row.coverage) << '\n';
      rows.push_back(std::move(row));
    }
  }

  write_metrics_csv(root / "metrics.csv", rows);
  return rows;
}

double correct_snapshot(const std::filesystem::path& input,
                        std::optional<std::size_t> empirical_reevals,
                        std::optional<std::filesystem::path> output, std::ostream& log) {
  const LoadedArchive loaded = archive_from_json(load_json(input));
  const Task task = make_task(loaded.meta.task);

  GroundTruthSource truth;
  if (empirical_reevals.has_value()) {
    if (*empirical_reevals == 0) throw std::invalid_argument("empirical correction needs K >= 1");
    truth.kind = GroundTruthSource::Kind::Empirical;
    truth.reeval_count = *empirical_reevals;
  }

  const auto top = loaded.grid.top_layer();
  DepthGrid corrected =
      build_corrected_archive(top, truth, task, loaded.grid.spec(), loaded.meta.seed);

  SnapshotMeta meta = loaded.meta;
  meta.kind = "corrected";
  std::filesystem::path out_path;
  if (output.has_value()) {
    out_path = *output;
  } else {
    out_path = input;
    out_path.replace_filename(input.stem().string() + "_corrected.json");
  }
  save_json(out_path, archive_to_json(corrected, meta));

  const double score = qd_score(corrected, task.fitness_bounds).value;
  log << "corrected_qd_score " << format_double(score) << '\n';
  log << "written " << out_path.string() << '\n';
  return score;
}

std::string preset_table() {
  std::ostringstream out;
  out << "name              N   N_re  depth  addition              selection                   "
         "extraction\n";
  for (const auto& name : preset_names()) {
    const AlgorithmConfig config = preset(name);
    std::string extraction = to_string(config.extraction.kind);
    if (config.extraction.kind == ExtractionKind::RankWeighted) {
      extraction += " (p=" + format_double(config.extraction.proportion) +
                    ", base=" + format_double(config.extraction.base) +
                    ", extracts min(floor(p*B), occupied))";
    } else if (config.extraction.kind == ExtractionKind::FullArchive) {
      extraction += " (extracts every occupied slot)";
    } else if (config.extraction.kind == ExtractionKind::AdaptiveChallenge) {
      extraction += " (extracts <= b + b*d)";
    }
    char line[256];
    std::snprintf(line, sizeof(line), "%-17s %-3zu %-5zu %-6zu %-21s %-27s %s\n", name.c_str(),
                  config.first_eval_samples, config.effective_reeval_samples(), config.depth,
                  to_string(config.addition.kind).c_str(), to_string(config.selection).c_str(),
                  extraction.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace uqd
