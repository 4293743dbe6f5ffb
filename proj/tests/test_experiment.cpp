#include <doctest.h>

#include <uqd/experiment.hpp>
#include <uqd/serialize.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace uqd;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMetricsHeader =
    "run_id,seed,algorithm,task,generation,corrected_qd_score,illusory_qd_score,"
    "coverage,average_samples,evals_total,max_samples,clamped_cells,status";

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

nlohmann::json tiny_config(const fs::path& out_dir) {
  return {{"pairs", {{{"algorithm", "vanilla_me"}, {"task", "arm_clean"}}}},
          {"seeds", {1, 2}},
          {"sampling_size", 32},
          {"generations", 3},
          {"grid", {16, 16}},
          {"output_dir", out_dir.string()}};
}

}  // namespace

TEST_CASE("algorithm configs parse from preset names or explicit blocks") {
  CHECK(algorithm_from_json("extract_me").extraction.kind == ExtractionKind::RankWeighted);

  const nlohmann::json custom{
      {"name", "mine"},
      {"samples", 4},
      {"reeval_samples", 8},
      {"depth", 16},
      {"addition", "seniority_fitness"},
      {"selection", "fitness_proportional_depth"},
      {"variation", {{"kind", "gaussian"}, {"sigma", 0.2}}},
      {"extraction", {{"kind", "rank_weighted"}, {"proportion", 0.5}, {"base", 3.0}}}};
  const auto config = algorithm_from_json(custom);
  CHECK(config.name == "mine");
  CHECK(config.first_eval_samples == 4);
  CHECK(config.reeval_samples == 8);
  CHECK(config.effective_reeval_samples() == 8);
  CHECK(config.depth == 16);
  CHECK(config.addition.kind == AdditionKind::SeniorityFitness);
  CHECK(config.selection == SelectionKind::FitnessProportionalDepth);
  CHECK(config.variation.kind == VariationKind::Gaussian);
  CHECK(config.variation.sigma == 0.2);
  CHECK(config.extraction.proportion == 0.5);
  CHECK(config.extraction.base == 3.0);

  const nlohmann::json weighted{
      {"addition", {{"kind", "weighted"}, {"weight_fitness", 2.0}, {"weight_spread", 0.5}}}};
  const auto policy = algorithm_from_json(weighted).addition;
  CHECK(policy.kind == AdditionKind::Weighted);
  CHECK(policy.weight_fitness == 2.0);
  CHECK(policy.weight_spread == 0.5);
}

TEST_CASE("config parsing fails fast on malformed input") {
  CHECK_THROWS_WITH_AS(algorithm_from_json({{"samplez", 4}}),
                       doctest::Contains("unknown key 'samplez'"), ConfigError);
  CHECK_THROWS_WITH_AS(algorithm_from_json({{"extraction", "rank_weighted"}}),
                       "rank_weighted extraction needs a proportion; use an object", ConfigError);
  CHECK_THROWS_WITH_AS(algorithm_from_json({{"selection", "best_only"}}),
                       "unknown selection: best_only", ConfigError);
  CHECK_THROWS_WITH_AS(algorithm_from_json({{"addition", "sorted"}}),
                       "unknown addition policy: sorted", ConfigError);
  CHECK_THROWS_WITH_AS(algorithm_from_json({{"variation", {{"kind", "cauchy"}}}}),
                       "unknown variation: cauchy", ConfigError);
  // Explicit blocks still go through semantic validation.
  CHECK_THROWS(algorithm_from_json({{"samples", 0}}));

  CHECK_THROWS_WITH_AS(experiment_from_json({{"seeds", {1}}}),
                       "config needs a non-empty 'pairs' array", ConfigError);
  CHECK_THROWS_WITH_AS(
      experiment_from_json({{"pairs", {{{"algorithm", "vanilla_me"}, {"task", "arm_clean"}}}}}),
      "config needs a non-empty 'seeds' array", ConfigError);
  CHECK_THROWS_WITH_AS(experiment_from_json(
                           {{"pairs", {{{"algorithm", "vanilla_me"}, {"task", "arm_clean"}}}},
                            {"seeds", {1}},
                            {"sampling_size", 0}}),
                       "sampling_size must be positive", ConfigError);

  auto bad_truth = tiny_config("unused");
  bad_truth["ground_truth"] = 7;
  CHECK_THROWS_WITH_AS(experiment_from_json(bad_truth),
                       "ground_truth must be \"analytic\" or {\"empirical\": K}", ConfigError);
  auto zero_truth = tiny_config("unused");
  zero_truth["ground_truth"] = {{"empirical", 0}};
  CHECK_THROWS_WITH_AS(experiment_from_json(zero_truth), "empirical ground truth needs K >= 1",
                       ConfigError);
  auto unknown_task = tiny_config("unused");
  unknown_task["pairs"][0]["task"] = "labyrinth";
  CHECK_THROWS_WITH(experiment_from_json(unknown_task), "unknown task: labyrinth");
}

TEST_CASE("experiment configs carry run settings and ground-truth choice") {
  auto j = tiny_config("some/dir");
  j["workers"] = 3;
  j["aggregator"] = "median";
  j["ground_truth"] = {{"empirical", 64}};
  const auto config = experiment_from_json(j);
  REQUIRE(config.pairs.size() == 1);
  CHECK(config.pairs[0].algorithm.name == "vanilla_me");
  CHECK(config.pairs[0].task_name == "arm_clean");
  CHECK(config.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(config.sampling_size == 32);
  CHECK(config.generations == 3);
  CHECK(config.grid_dims == std::vector<std::size_t>{16, 16});
  CHECK(config.output_dir == fs::path("some/dir"));
  CHECK(config.workers == 3);
  CHECK(config.aggregator == Aggregator::Median);
  CHECK(config.truth.kind == GroundTruthSource::Kind::Empirical);
  CHECK(config.truth.reeval_count == 64);
}

TEST_CASE("relative output directories resolve against the configured root") {
  unsetenv("UQD_OUTPUT_ROOT");
  CHECK(resolve_output_dir("runs") == fs::path("runs"));
  CHECK(resolve_output_dir("/abs/runs") == fs::path("/abs/runs"));
  setenv("UQD_OUTPUT_ROOT", "/srv/uqd", 1);
  CHECK(resolve_output_dir("runs") == fs::path("/srv/uqd/runs"));
  CHECK(resolve_output_dir("/abs/runs") == fs::path("/abs/runs"));
  unsetenv("UQD_OUTPUT_ROOT");
}

TEST_CASE("an experiment writes per-cell artifacts and an aggregate table") {
  const fs::path dir = fresh_dir("uqd_experiment_ok");
  const auto config = experiment_from_json(tiny_config(dir));
  std::ostringstream log;
  const auto rows = run_experiment(config, log);

  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.status == "ok");
    CHECK(row.algorithm == "vanilla_me");
    CHECK(row.task == "arm_clean");
    CHECK(row.evals_total == 3 * 32);
    CHECK(row.coverage > 0.0);
    CHECK(row.average_samples == 1.0);
    CHECK(row.max_samples == 1);
    // Noise-free task: the corrected archive scores exactly the illusory one.
    CHECK(row.corrected_qd_score == row.illusory_qd_score);
    CHECK(row.clamped_cells == 0);

    const fs::path cell = dir / row.run_id;
    CHECK(fs::exists(cell / "per_generation.csv"));
    CHECK(fs::exists(cell / "archive.json"));
    CHECK(fs::exists(cell / "archive_corrected.json"));

    const auto per_gen = lines_of(read_file(cell / "per_generation.csv"));
    REQUIRE(per_gen.size() == 1 + 3);
    CHECK(per_gen[0] ==
          "generation,evals_used,offspring,extracted,occupied_cells,occupied_slots,"
          "illusory_qd_score,average_samples,max_samples");
    CHECK(per_gen[1].substr(0, 5) == "0,32,");

    const auto loaded = archive_from_json(load_json(cell / "archive.json"));
    CHECK(loaded.meta.kind == "illusory");
    CHECK(loaded.meta.seed == row.seed);
    const auto corrected = archive_from_json(load_json(cell / "archive_corrected.json"));
    CHECK(corrected.meta.kind == "corrected");
    CHECK(corrected.grid.spec().depth == 1);
  }
  CHECK(rows[0].run_id == "vanilla_me_arm_clean_1");
  CHECK(rows[1].run_id == "vanilla_me_arm_clean_2");

  const auto metrics = lines_of(read_file(dir / "metrics.csv"));
  REQUIRE(metrics.size() == 3);
  CHECK(metrics[0] == kMetricsHeader);
  CHECK(metrics[1].substr(0, 25) == "vanilla_me_arm_clean_1,1,");
  CHECK(metrics[1].find(",final,") != std::string::npos);
  CHECK(metrics[1].find(",ok") != std::string::npos);
}

TEST_CASE("a cell that outgrows its budget is reported undefined, not fatal") {
  const fs::path dir = fresh_dir("uqd_experiment_undefined");
  nlohmann::json j{{"pairs",
                    {{{"algorithm", "archive_sampling"}, {"task", "sphere"}},
                     {{"algorithm", "vanilla_me"}, {"task", "sphere"}}}},
                   {"seeds", {5}},
                   {"sampling_size", 64},
                   {"generations", 12},
                   {"grid", {32, 32}},
                   {"output_dir", dir.string()}};
  std::ostringstream log;
  const auto rows = run_experiment(experiment_from_json(j), log);

  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status == "undefined");
  CHECK(rows[0].evals_total > 0);
  CHECK(rows[1].status == "ok");
  CHECK(log.str().find("status undefined") != std::string::npos);

  // The failed cell keeps its partial per-generation log but no snapshot.
  const fs::path failed = dir / rows[0].run_id;
  CHECK(fs::exists(failed / "per_generation.csv"));
  CHECK_FALSE(fs::exists(failed / "archive.json"));

  const auto metrics = lines_of(read_file(dir / "metrics.csv"));
  REQUIRE(metrics.size() == 3);
  CHECK(metrics[1].find(",undefined") != std::string::npos);
  CHECK(metrics[1].find(",final,,,,,") != std::string::npos);
  CHECK(metrics[2].find(",ok") != std::string::npos);
}

TEST_CASE("experiments are reproducible across runs and worker counts") {
  const fs::path dir_a = fresh_dir("uqd_experiment_rep_a");
  const fs::path dir_b = fresh_dir("uqd_experiment_rep_b");
  const fs::path dir_c = fresh_dir("uqd_experiment_rep_c");

  nlohmann::json j{{"pairs", {{{"algorithm", "extract_me"}, {"task", "arm_desc_noise"}}}},
                   {"seeds", {11}},
                   {"sampling_size", 64},
                   {"generations", 6},
                   {"grid", {16, 16}}};
  std::ostringstream log;
  j["output_dir"] = dir_a.string();
  run_experiment(experiment_from_json(j), log);
  j["output_dir"] = dir_b.string();
  run_experiment(experiment_from_json(j), log);
  j["output_dir"] = dir_c.string();
  j["workers"] = 3;
  run_experiment(experiment_from_json(j), log);

  const auto metrics_a = read_file(dir_a / "metrics.csv");
  CHECK(metrics_a == read_file(dir_b / "metrics.csv"));
  CHECK(metrics_a == read_file(dir_c / "metrics.csv"));
  const auto cell = fs::path("extract_me_arm_desc_noise_11");
  CHECK(read_file(dir_a / cell / "archive.json") == read_file(dir_c / cell / "archive.json"));
  CHECK(read_file(dir_a / cell / "per_generation.csv") ==
        read_file(dir_c / cell / "per_generation.csv"));
}

TEST_CASE("snapshot correction reproduces the experiment's corrected score") {
  const fs::path dir = fresh_dir("uqd_experiment_correct");
  auto j = tiny_config(dir);
  j["pairs"][0]["algorithm"] = "extract_me";
  j["pairs"][0]["task"] = "arm_fit_noise";
  j["seeds"] = {9};
  std::ostringstream log;
  const auto rows = run_experiment(experiment_from_json(j), log);
  REQUIRE(rows.size() == 1);

  const fs::path snapshot = dir / rows[0].run_id / "archive.json";
  const fs::path out = dir / "recorrected.json";
  const double score = correct_snapshot(snapshot, std::nullopt, out, log);
  CHECK(score == rows[0].corrected_qd_score);
  CHECK(fs::exists(out));
  CHECK(archive_from_json(load_json(out)).meta.kind == "corrected");

  // Default output lands next to the input with a _corrected suffix.
  fs::remove(dir / rows[0].run_id / "archive_corrected.json");
  correct_snapshot(snapshot, std::nullopt, std::nullopt, log);
  CHECK(fs::exists(dir / rows[0].run_id / "archive_corrected.json"));

  // Empirical correction works and differs from analytic on a noisy task.
  const double empirical = correct_snapshot(snapshot, 32, out, log);
  CHECK(empirical != score);
  CHECK_THROWS_WITH(correct_snapshot(snapshot, 0, out, log), "empirical correction needs K >= 1");
}

TEST_CASE("the preset table lists every algorithm") {
  const auto table = preset_table();
  for (const auto& name : preset_names()) {
    CHECK(table.find(name) != std::string::npos);
  }
  CHECK(table.find("extraction") != std::string::npos);
  CHECK(table.find("uniform_top") != std::string::npos);
}

#ifdef UQD_CLI_PATH
TEST_CASE("the command line front end runs, corrects and lists presets") {
  const fs::path dir = fresh_dir("uqd_cli_smoke");
  const std::string cli = UQD_CLI_PATH;

  const std::string presets_cmd = cli + " presets > " + (dir / "presets.txt").string();
  REQUIRE(std::system(presets_cmd.c_str()) == 0);
  const auto table = read_file(dir / "presets.txt");
  CHECK(table.find("extract_me") != std::string::npos);
  CHECK(table.find("deep_grid") != std::string::npos);

  auto j = tiny_config(dir / "runs");
  j["pairs"][0]["algorithm"] = "extract_me";
  j["pairs"][0]["task"] = "arm_fit_noise";
  j["seeds"] = {4};
  {
    std::ofstream out(dir / "config.json");
    out << j.dump(1) << '\n';
  }
  const std::string run_cmd = cli + " run " + (dir / "config.json").string() + " > " +
                              (dir / "run.log").string() + " 2>&1";
  REQUIRE(std::system(run_cmd.c_str()) == 0);
  const fs::path snapshot = dir / "runs" / "extract_me_arm_fit_noise_4" / "archive.json";
  REQUIRE(fs::exists(snapshot));
  CHECK(fs::exists(dir / "runs" / "metrics.csv"));
  CHECK(read_file(dir / "run.log").find("corrected_qd_score=") != std::string::npos);

  const std::string correct_cmd = cli + " correct " + snapshot.string() + " --output " +
                                  (dir / "fixed.json").string() + " > " +
                                  (dir / "correct.log").string() + " 2>&1";
  REQUIRE(std::system(correct_cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "fixed.json"));
  CHECK(read_file(dir / "correct.log").find("corrected_qd_score") != std::string::npos);

  const std::string bad_cmd = cli + " run " + (dir / "missing.json").string() + " > /dev/null 2>&1";
  CHECK(std::system(bad_cmd.c_str()) != 0);
  const std::string unknown_cmd = cli + " frobnicate > /dev/null 2>&1";
  CHECK(std::system(unknown_cmd.c_str()) != 0);
}
#endif
