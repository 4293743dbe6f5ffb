#include "uqd/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace uqd {

namespace {

constexpr const char* kFormatTag = "uqd-archive-v1";

AdditionKind addition_kind_from_string(const std::string& text) {
  if (text == "fitness") return AdditionKind::Fitness;
  if (text == "reproducibility") return AdditionKind::Reproducibility;
  if (text == "weighted") return AdditionKind::Weighted;
  if (text == "seniority_fitness") return AdditionKind::SeniorityFitness;
  if (text == "challenge_low_spread") return AdditionKind::ChallengeLowSpread;
  if (text == "challenge_delta") return AdditionKind::ChallengeDelta;
  throw std::invalid_argument("unknown addition policy: " + text);
}

}  // namespace

nlohmann::json record_to_json(const SolutionRecord& record) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : record.buffer.samples()) {
    samples.push_back({{"f", s.fitness}, {"d", s.descriptor}});
  }
  nlohmann::json j{{"id", record.id},
                   {"genotype", record.genotype},
                   {"samples", std::move(samples)},
                   {"birth_generation", record.birth_generation}};
  if (record.parent_id.has_value()) {
    j["parent_id"] = *record.parent_id;
  } else {
    j["parent_id"] = nullptr;
  }
  return j;
}

SolutionRecord record_from_json(const nlohmann::json& j, Aggregator aggregator) {
  SolutionRecord record;
  record.id = j.at("id").get<std::uint64_t>();
  record.genotype = j.at("genotype").get<Genotype>();
  record.birth_generation = j.at("birth_generation").get<std::size_t>();
  if (!j.at("parent_id").is_null()) {
    record.parent_id = j.at("parent_id").get<std::uint64_t>();
  }
  std::vector<EvalSample> samples;
  for (const auto& s : j.at("samples")) {
    EvalSample sample;
    sample.fitness = s.at("f").get<double>();
    sample.descriptor = s.at("d").get<std::vector<double>>();
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) throw std::invalid_argument("record without samples");
  record.absorb(samples, aggregator);
  return record;
}

nlohmann::json policy_to_json(const AdditionPolicy& policy) {
  return {{"kind", to_string(policy.kind)},
          {"weight_fitness", policy.weight_fitness},
          {"weight_spread", policy.weight_spread},
          {"delta_fitness", policy.delta_fitness},
          {"delta_spread", policy.delta_spread}};
}

AdditionPolicy policy_from_json(const nlohmann::json& j) {
  AdditionPolicy policy;
  policy.kind = addition_kind_from_string(j.at("kind").get<std::string>());
  policy.weight_fitness = j.value("weight_fitness", 1.0);
  policy.weight_spread = j.value("weight_spread", 1.0);
  policy.delta_fitness = j.value("delta_fitness", 0.01);
  policy.delta_spread = j.value("delta_spread", 0.01);
  return policy;
}

nlohmann::json grid_spec_to_json(const GridSpec& spec) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& [lo, hi] : spec.bounds) bounds.push_back({lo, hi});
  return {{"dims", spec.dims}, {"bounds", std::move(bounds)}, {"depth", spec.depth}};
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec spec;
  spec.dims = j.at("dims").get<std::vector<std::size_t>>();
  for (const auto& b : j.at("bounds")) {
    spec.bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  }
  spec.depth = j.at("depth").get<std::size_t>();
  return spec;
}

nlohmann::json archive_to_json(const DepthGrid& grid, const SnapshotMeta& meta) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t c = 0; c < grid.cells().size(); ++c) {
    const auto& slots = grid.cells()[c].slots;
    if (slots.empty()) continue;
    nlohmann::json slot_array = nlohmann::json::array();
    for (const auto& record : slots) slot_array.push_back(record_to_json(record));
    cells.push_back({{"index", c}, {"slots", std::move(slot_array)}});
  }

  nlohmann::json spec = grid_spec_to_json(grid.spec());
  spec["addition"] = policy_to_json(grid.policy());

  return {{"meta",
           {{"format", kFormatTag},
            {"kind", meta.kind},
            {"algorithm", meta.algorithm},
            {"task", meta.task},
            {"seed", meta.seed},
            {"sampling_size", meta.sampling_size},
            {"generations", meta.generations},
            {"aggregator", to_string(meta.aggregator)},
            {"fitness_bounds", {meta.fitness_bounds.first, meta.fitness_bounds.second}}}},
          {"spec", std::move(spec)},
          {"cells", std::move(cells)}};
}

LoadedArchive archive_from_json(const nlohmann::json& j) {
  const auto& meta_json = j.at("meta");
  if (meta_json.at("format").get<std::string>() != kFormatTag) {
    throw std::invalid_argument("unrecognized archive format");
  }
  SnapshotMeta meta;
  meta.kind = meta_json.at("kind").get<std::string>();
  meta.algorithm = meta_json.at("algorithm").get<std::string>();
  meta.task = meta_json.at("task").get<std::string>();
  meta.seed = meta_json.at("seed").get<std::uint64_t>();
  meta.sampling_size = meta_json.at("sampling_size").get<std::size_t>();
  meta.generations = meta_json.at("generations").get<std::size_t>();
  meta.aggregator = aggregator_from_string(meta_json.at("aggregator").get<std::string>());
  meta.fitness_bounds = {meta_json.at("fitness_bounds").at(0).get<double>(),
                         meta_json.at("fitness_bounds").at(1).get<double>()};

  GridSpec spec = grid_spec_from_json(j.at("spec"));
  AdditionPolicy policy = policy_from_json(j.at("spec").at("addition"));

  LoadedArchive loaded{DepthGrid(std::move(spec), policy), meta};
  for (const auto& cell : j.at("cells")) {
    const auto index = cell.at("index").get<std::size_t>();
    for (const auto& slot : cell.at("slots")) {
      SolutionRecord record = record_from_json(slot, meta.aggregator);
      if (loaded.grid.bin(record.estimates.descriptor) != index) {
        throw std::invalid_argument("record descriptor does not bin to its stored cell");
      }
      loaded.grid.place_unchecked(index, std::move(record));
    }
  }
  return loaded;
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace uqd
