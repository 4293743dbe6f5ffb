#include "uqd/container.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace uqd {

std::size_t GridSpec::cell_count() const {
  std::size_t count = 1;
  for (std::size_t d : dims) count *= d;
  return count;
}

void GridSpec::validate() const {
  if (dims.empty()) throw std::invalid_argument("grid needs at least one dimension");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("grid dimensions must be positive");
  }
  if (bounds.size() != dims.size()) {
    throw std::invalid_argument("grid bounds must match dimension count");
  }
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw std::invalid_argument("grid bounds must satisfy lo < hi");
  }
  if (depth == 0) throw std::invalid_argument("depth must be at least 1");
}

std::string to_string(AdditionKind kind) {
  switch (kind) {
    case AdditionKind::Fitness: return "fitness";
    case AdditionKind::Reproducibility: return "reproducibility";
    case AdditionKind::Weighted: return "weighted";
    case AdditionKind::SeniorityFitness: return "seniority_fitness";
    case AdditionKind::ChallengeLowSpread: return "challenge_low_spread";
    case AdditionKind::ChallengeDelta: return "challenge_delta";
  }
  return "unknown";
}

void AdditionPolicy::validate() const {
  if (kind == AdditionKind::Weighted) {
    if (weight_fitness < 0 || weight_spread < 0 || (weight_fitness == 0 && weight_spread == 0)) {
      throw std::invalid_argument("weighted addition needs non-negative weights, not both zero");
    }
  }
  if (kind == AdditionKind::ChallengeDelta) {
    if (delta_fitness < 0 || delta_spread < 0) {
      throw std::invalid_argument("challenge deltas must be non-negative");
    }
  }
}

namespace {

constexpr double kWorstSpread = std::numeric_limits<double>::infinity();

double spread_or_worst(const SolutionRecord& r) {
  return r.estimates.spread.value_or(kWorstSpread);
}

// Ties in every ordering break on lower id, keeping runs seed-stable.
bool better_fitness(const SolutionRecord& a, const SolutionRecord& b) {
  if (a.estimates.fitness != b.estimates.fitness) {
    return a.estimates.fitness > b.estimates.fitness;
  }
  return a.id < b.id;
}

bool better_spread(const SolutionRecord& a, const SolutionRecord& b) {
  const double sa = spread_or_worst(a);
  const double sb = spread_or_worst(b);
  if (sa != sb) return sa < sb;
  return a.id < b.id;
}

// Best-first order of pool indices by summed fitness/spread ranks.
std::vector<std::size_t> weighted_order(const std::vector<SolutionRecord>& pool,
                                        const AdditionPolicy& policy) {
  const std::size_t n = pool.size();
  std::vector<std::size_t> by_fitness(n), by_spread(n);
  std::iota(by_fitness.begin(), by_fitness.end(), std::size_t{0});
  std::iota(by_spread.begin(), by_spread.end(), std::size_t{0});
  std::sort(by_fitness.begin(), by_fitness.end(),
            [&](std::size_t a, std::size_t b) { return better_fitness(pool[a], pool[b]); });
  std::sort(by_spread.begin(), by_spread.end(),
            [&](std::size_t a, std::size_t b) { return better_spread(pool[a], pool[b]); });

  std::vector<double> score(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    score[by_fitness[r]] += policy.weight_fitness * static_cast<double>(r);
    score[by_spread[r]] += policy.weight_spread * static_cast<double>(r);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    return pool[a].id < pool[b].id;
  });
  return order;
}

}  // namespace

DepthGrid::DepthGrid(GridSpec spec, AdditionPolicy policy)
    : spec_(std::move(spec)), policy_(policy) {
  if (spec_.bounds.empty()) {
    spec_.bounds.assign(spec_.dims.size(), {0.0, 1.0});
  }
  spec_.validate();
  policy_.validate();
  const bool challenge = policy_.kind == AdditionKind::ChallengeLowSpread ||
                         policy_.kind == AdditionKind::ChallengeDelta;
  if (challenge && spec_.depth != 1) {
    throw std::invalid_argument("challenge addition policies require depth 1");
  }
  cells_.resize(spec_.cell_count());
}

std::size_t DepthGrid::bin(const std::vector<double>& descriptor) const {
  if (descriptor.size() != spec_.dims.size()) {
    throw std::invalid_argument("descriptor dimension does not match grid");
  }
  std::size_t index = 0;
  for (std::size_t d = 0; d < spec_.dims.size(); ++d) {
    const auto [lo, hi] = spec_.bounds[d];
    const double unit = (descriptor[d] - lo) / (hi - lo);
    auto i = static_cast<long long>(std::floor(unit * static_cast<double>(spec_.dims[d])));
    i = std::clamp(i, 0LL, static_cast<long long>(spec_.dims[d]) - 1);
    index = index * spec_.dims[d] + static_cast<std::size_t>(i);
  }
  return index;
}

InsertOutcome DepthGrid::insert(SolutionRecord record) {
  if (record.estimates.eval_count == 0) {
    throw std::invalid_argument("record has no evaluations");
  }
  if (contains(record.id)) {
    throw std::invalid_argument("duplicate record id");
  }
  const std::size_t cell_index = bin(record.estimates.descriptor);
  const bool was_empty = cells_[cell_index].slots.empty();

  InsertOutcome outcome;
  switch (policy_.kind) {
    case AdditionKind::Fitness:
    case AdditionKind::Reproducibility:
      outcome = insert_ordered(cell_index, std::move(record));
      break;
    case AdditionKind::Weighted:
      outcome = insert_weighted(cell_index, std::move(record));
      break;
    case AdditionKind::SeniorityFitness:
      outcome = insert_seniority(cell_index, std::move(record));
      break;
    case AdditionKind::ChallengeLowSpread:
    case AdditionKind::ChallengeDelta:
      outcome = insert_challenge(cell_index, std::move(record));
      break;
  }

  if (outcome.kind == InsertOutcome::Kind::Added) {
    ++slot_count_;
    if (was_empty) ++occupied_cells_;
  }
  return outcome;
}

InsertOutcome DepthGrid::insert_ordered(std::size_t cell_index, SolutionRecord record) {
  auto& slots = cells_[cell_index].slots;
  const bool by_fitness = policy_.kind == AdditionKind::Fitness;
  const auto better = [&](const SolutionRecord& a, const SolutionRecord& b) {
    return by_fitness ? better_fitness(a, b) : better_spread(a, b);
  };

  std::size_t pos = 0;
  while (pos < slots.size() && !better(record, slots[pos])) ++pos;

  if (pos == slots.size() && slots.size() >= spec_.depth) {
    return {InsertOutcome::Kind::Rejected, 0, std::nullopt};
  }

  locator_[record.id] = cell_index;
  slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(pos), std::move(record));

  if (slots.size() > spec_.depth) {
    const std::uint64_t evicted = slots.back().id;
    locator_.erase(evicted);
    slots.pop_back();
    return {InsertOutcome::Kind::Replaced, pos, evicted};
  }
  return {InsertOutcome::Kind::Added, pos, std::nullopt};
}

InsertOutcome DepthGrid::insert_weighted(std::size_t cell_index, SolutionRecord record) {
  auto& slots = cells_[cell_index].slots;
  const std::uint64_t candidate_id = record.id;

  std::vector<SolutionRecord> pool = std::move(slots);
  slots.clear();
  pool.push_back(std::move(record));

  auto order = weighted_order(pool, policy_);

  const auto position_of = [&](std::uint64_t id, const std::vector<std::size_t>& ord) {
    for (std::size_t r = 0; r < ord.size(); ++r) {
      if (pool[ord[r]].id == id) return r;
    }
    return ord.size();
  };

  if (pool.size() <= spec_.depth) {
    const std::size_t rank = position_of(candidate_id, order);
    std::vector<SolutionRecord> arranged;
    arranged.reserve(pool.size());
    for (std::size_t idx : order) arranged.push_back(std::move(pool[idx]));
    slots = std::move(arranged);
    locator_[candidate_id] = cell_index;
    return {InsertOutcome::Kind::Added, rank, std::nullopt};
  }

  const std::size_t worst = order.back();
  if (pool[worst].id == candidate_id) {
    pool.pop_back();
    slots = std::move(pool);
    return {InsertOutcome::Kind::Rejected, 0, std::nullopt};
  }

  const std::uint64_t evicted = pool[worst].id;
  locator_.erase(evicted);
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(worst));

  // Survivors are re-ranked among themselves so stored order stays consistent
  // with the policy over the new cell contents.
  auto survivors = weighted_order(pool, policy_);
  const std::size_t rank = position_of(candidate_id, survivors);
  std::vector<SolutionRecord> arranged;
  arranged.reserve(pool.size());
  for (std::size_t idx : survivors) arranged.push_back(std::move(pool[idx]));
  slots = std::move(arranged);
  locator_[candidate_id] = cell_index;
  return {InsertOutcome::Kind::Replaced, rank, evicted};
}

InsertOutcome DepthGrid::insert_seniority(std::size_t cell_index, SolutionRecord record) {
  auto& slots = cells_[cell_index].slots;
  locator_[record.id] = cell_index;
  slots.push_back(std::move(record));
  if (slots.size() > spec_.depth) {
    const std::uint64_t evicted = slots.front().id;
    locator_.erase(evicted);
    slots.erase(slots.begin());
    return {InsertOutcome::Kind::Replaced, slots.size() - 1, evicted};
  }
  return {InsertOutcome::Kind::Added, slots.size() - 1, std::nullopt};
}

InsertOutcome DepthGrid::insert_challenge(std::size_t cell_index, SolutionRecord record) {
  auto& slots = cells_[cell_index].slots;
  if (slots.empty()) {
    locator_[record.id] = cell_index;
    slots.push_back(std::move(record));
    return {InsertOutcome::Kind::Added, 0, std::nullopt};
  }

  const SolutionRecord& incumbent = slots.front();
  const double gain = record.estimates.fitness - incumbent.estimates.fitness;
  const double cand_spread = spread_or_worst(record);
  const double inc_spread = spread_or_worst(incumbent);
  double spread_increase;
  if (std::isinf(cand_spread) && std::isinf(inc_spread)) {
    spread_increase = 0.0;
  } else {
    spread_increase = cand_spread - inc_spread;
  }

  bool admit = false;
  if (policy_.kind == AdditionKind::ChallengeLowSpread) {
    admit = gain > 0 && spread_increase < 0;
  } else {
    admit = gain >= policy_.delta_fitness ||
            (gain >= 0 && spread_increase <= policy_.delta_spread) ||
            (-spread_increase >= policy_.delta_spread && -gain <= policy_.delta_fitness);
  }

  if (!admit) return {InsertOutcome::Kind::Rejected, 0, std::nullopt};

  const std::uint64_t evicted = incumbent.id;
  locator_.erase(evicted);
  locator_[record.id] = cell_index;
  slots.front() = std::move(record);
  return {InsertOutcome::Kind::Replaced, 0, evicted};
}

SolutionRecord DepthGrid::remove(std::uint64_t id) {
  auto it = locator_.find(id);
  if (it == locator_.end()) throw std::invalid_argument("record not in archive");
  auto& slots = cells_[it->second].slots;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].id == id) {
      SolutionRecord record = std::move(slots[i]);
      slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(i));
      locator_.erase(it);
      --slot_count_;
      if (slots.empty()) --occupied_cells_;
      return record;
    }
  }
  throw std::logic_error("locator out of sync with cells");
}

const SolutionRecord* DepthGrid::exposed_elite(std::size_t cell_index) const {
  const auto& slots = cells_[cell_index].slots;
  if (slots.empty()) return nullptr;
  if (policy_.kind == AdditionKind::SeniorityFitness) {
    const SolutionRecord* best = &slots.front();
    for (const auto& s : slots) {
      if (better_fitness(s, *best)) best = &s;
    }
    return best;
  }
  return &slots.front();
}

std::vector<const SolutionRecord*> DepthGrid::top_layer() const {
  std::vector<const SolutionRecord*> layer;
  layer.reserve(occupied_cells_);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (const SolutionRecord* elite = exposed_elite(c)) layer.push_back(elite);
  }
  return layer;
}

void DepthGrid::place_unchecked(std::size_t cell_index, SolutionRecord record) {
  if (cell_index >= cells_.size()) throw std::out_of_range("cell index outside grid");
  if (cells_[cell_index].slots.size() >= spec_.depth) {
    throw std::invalid_argument("cell already at depth capacity");
  }
  if (contains(record.id)) throw std::invalid_argument("duplicate record id");
  if (cells_[cell_index].slots.empty()) ++occupied_cells_;
  locator_[record.id] = cell_index;
  cells_[cell_index].slots.push_back(std::move(record));
  ++slot_count_;
}

}  // namespace uqd
