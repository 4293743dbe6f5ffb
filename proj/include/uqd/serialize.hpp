#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "uqd/container.hpp"
#include "uqd/core.hpp"

namespace uqd {

struct SnapshotMeta {
  std::string kind = "illusory";  // or "corrected"
  std::string algorithm;
  std::string task;
  std::uint64_t seed = 0;
  std::size_t sampling_size = 0;
  std::size_t generations = 0;
  Aggregator aggregator = Aggregator::Mean;
  std::pair<double, double> fitness_bounds = {0.0, 1.0};
};

nlohmann::json record_to_json(const SolutionRecord& record);
// Estimates are recomputed from the stored samples with the given aggregator.
SolutionRecord record_from_json(const nlohmann::json& j, Aggregator aggregator);

nlohmann::json policy_to_json(const AdditionPolicy& policy);
AdditionPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

// Snapshot layout: {meta, spec, cells: [{index, slots: [record]}]}. Genotype
// and sample values round-trip bit-exactly.
nlohmann::json archive_to_json(const DepthGrid& grid, const SnapshotMeta& meta);

struct LoadedArchive {
  DepthGrid grid;
  SnapshotMeta meta;
};

LoadedArchive archive_from_json(const nlohmann::json& j);

void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace uqd
