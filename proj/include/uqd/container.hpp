#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "uqd/core.hpp"

namespace uqd {

struct GridSpec {
  std::vector<std::size_t> dims;                   // bins per descriptor axis
  std::vector<std::pair<double, double>> bounds;   // per-axis [lo, hi], default [0,1]
  std::size_t depth = 1;

  std::size_t cell_count() const;
  void validate() const;
};

enum class AdditionKind {
  Fitness,             // keep the d best by fitness estimate
  Reproducibility,     // keep the d lowest-spread
  Weighted,            // sum of fitness rank and spread rank
  SeniorityFitness,    // FIFO storage; fitness decides the exposed elite
  ChallengeLowSpread,  // depth-1 gate: strict improvement in both criteria
  ChallengeDelta,      // depth-1 gate: margin rule on fitness/spread deltas
};

std::string to_string(AdditionKind kind);

struct AdditionPolicy {
  AdditionKind kind = AdditionKind::Fitness;
  double weight_fitness = 1.0;  // Weighted only
  double weight_spread = 1.0;   // Weighted only
  double delta_fitness = 0.01;  // ChallengeDelta only
  double delta_spread = 0.01;   // ChallengeDelta only

  void validate() const;
};

struct InsertOutcome {
  enum class Kind { Added, Rejected, Replaced } kind = Kind::Rejected;
  std::size_t rank = 0;                     // slot index the candidate landed in
  std::optional<std::uint64_t> evicted_id;  // engaged for Replaced
};

struct Cell {
  std::vector<SolutionRecord> slots;
};

// Bounded-depth descriptor grid. Under total-ordering policies each cell's
// slots stay sorted best-first; under SeniorityFitness slots keep insertion
// order and the exposed elite is the fitness maximum.
class DepthGrid {
 public:
  DepthGrid(GridSpec spec, AdditionPolicy policy);

  const GridSpec& spec() const { return spec_; }
  const AdditionPolicy& policy() const { return policy_; }
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t occupied_cell_count() const { return occupied_cells_; }
  std::size_t occupied_slot_count() const { return slot_count_; }
  bool empty() const { return slot_count_ == 0; }
  bool contains(std::uint64_t id) const { return locator_.count(id) != 0; }

  std::size_t bin(const std::vector<double>& descriptor) const;

  InsertOutcome insert(SolutionRecord record);
  SolutionRecord remove(std::uint64_t id);

  const std::vector<Cell>& cells() const { return cells_; }
  const SolutionRecord* exposed_elite(std::size_t cell_index) const;
  std::vector<const SolutionRecord*> top_layer() const;  // ascending cell index

  // Places a record into an explicit cell without policy checks; used when
  // rebuilding an archive from a snapshot.
  void place_unchecked(std::size_t cell_index, SolutionRecord record);

 private:
  InsertOutcome insert_ordered(std::size_t cell_index, SolutionRecord record);
  InsertOutcome insert_weighted(std::size_t cell_index, SolutionRecord record);
  InsertOutcome insert_seniority(std::size_t cell_index, SolutionRecord record);
  InsertOutcome insert_challenge(std::size_t cell_index, SolutionRecord record);

  GridSpec spec_;
  AdditionPolicy policy_;
  std::vector<Cell> cells_;
  std::unordered_map<std::uint64_t, std::size_t> locator_;  // id -> cell index
  std::size_t slot_count_ = 0;
  std::size_t occupied_cells_ = 0;
};

}  // namespace uqd
