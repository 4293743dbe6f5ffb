#include "uqd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqd {

std::string to_string(SelectionKind kind) {
  return kind == SelectionKind::UniformTop ? "uniform_top" : "fitness_proportional_depth";
}

std::string to_string(VariationKind kind) {
  return kind == VariationKind::IsoLine ? "iso_line" : "gaussian";
}

std::string to_string(ExtractionKind kind) {
  switch (kind) {
    case ExtractionKind::None: return "none";
    case ExtractionKind::FullArchive: return "full_archive";
    case ExtractionKind::RankWeighted: return "rank_weighted";
    case ExtractionKind::AdaptiveChallenge: return "adaptive_challenge";
  }
  return "unknown";
}

std::vector<ParentPick> select_uniform_top(const DepthGrid& grid, std::size_t k,
                                           rng::Stream& stream) {
  const auto top = grid.top_layer();
  if (top.empty()) throw std::runtime_error("cannot select from empty archive");
  std::vector<ParentPick> picks;
  picks.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const SolutionRecord* r = top[stream.uniform_index(top.size())];
    picks.push_back({r->genotype, r->id});
  }
  return picks;
}

std::vector<ParentPick> select_fitness_proportional_depth(const DepthGrid& grid, std::size_t k,
                                                          rng::Stream& stream) {
  constexpr double kEpsilon = 1e-6;
  std::vector<std::size_t> occupied;
  for (std::size_t c = 0; c < grid.cells().size(); ++c) {
    if (!grid.cells()[c].slots.empty()) occupied.push_back(c);
  }
  if (occupied.empty()) throw std::runtime_error("cannot select from empty archive");

  std::vector<ParentPick> picks;
  picks.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& slots = grid.cells()[occupied[stream.uniform_index(occupied.size())]].slots;
    double f_min = slots.front().estimates.fitness;
    for (const auto& s : slots) f_min = std::min(f_min, s.estimates.fitness);

    double total = 0.0;
    for (const auto& s : slots) total += s.estimates.fitness - f_min + kEpsilon;

    const double u = stream.uniform01() * total;
    double cumulative = 0.0;
    const SolutionRecord* chosen = &slots.back();
    for (const auto& s : slots) {
      cumulative += s.estimates.fitness - f_min + kEpsilon;
      if (u < cumulative) {
        chosen = &s;
        break;
      }
    }
    picks.push_back({chosen->genotype, chosen->id});
  }
  return picks;
}

namespace {

void clip_unit(Genotype& g) {
  for (double& x : g) x = std::clamp(x, 0.0, 1.0);
}

}  // namespace

Genotype variation_iso_line(const Genotype& p1, const Genotype& p2, double sigma_iso,
                            double sigma_line, rng::Stream& stream) {
  if (p1.size() != p2.size()) throw std::invalid_argument("parent dimension mismatch");
  Genotype child(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    child[i] = p1[i] + sigma_iso * stream.gaussian();
  }
  const double line = sigma_line * stream.gaussian();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    child[i] += line * (p2[i] - p1[i]);
  }
  clip_unit(child);
  return child;
}

Genotype variation_gaussian(const Genotype& parent, double sigma, rng::Stream& stream) {
  Genotype child(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) {
    child[i] = parent[i] + sigma * stream.gaussian();
  }
  clip_unit(child);
  return child;
}

std::vector<SolutionRecord> extract_rank_weighted(DepthGrid& grid, std::size_t count,
                                                  double base, rng::Stream& stream) {
  if (base <= 1.0) throw std::invalid_argument("extraction base must exceed 1");
  count = std::min(count, grid.occupied_slot_count());
  std::vector<SolutionRecord> extracted;
  extracted.reserve(count);

  std::vector<std::pair<std::uint64_t, double>> weighted;
  for (std::size_t draw = 0; draw < count; ++draw) {
    weighted.clear();
    double total = 0.0;
    for (const auto& cell : grid.cells()) {
      for (std::size_t r = 0; r < cell.slots.size(); ++r) {
        const double w = std::pow(base, -static_cast<double>(r));
        weighted.emplace_back(cell.slots[r].id, w);
        total += w;
      }
    }
    const double u = stream.uniform01() * total;
    double cumulative = 0.0;
    std::uint64_t chosen = weighted.back().first;
    for (const auto& [id, w] : weighted) {
      cumulative += w;
      if (u < cumulative) {
        chosen = id;
        break;
      }
    }
    extracted.push_back(grid.remove(chosen));
  }
  return extracted;
}

std::vector<SolutionRecord> extract_full_archive(DepthGrid& grid) {
  std::vector<SolutionRecord> extracted;
  extracted.reserve(grid.occupied_slot_count());
  for (const auto& cell : grid.cells()) {
    while (!cell.slots.empty()) {
      extracted.push_back(grid.remove(cell.slots.front().id));
    }
  }
  return extracted;
}

ChallengeOutcome resolve_adaptive_challenges(DepthGrid& grid,
                                             std::deque<SolutionRecord>& pending,
                                             std::size_t max_reevals) {
  const auto better = [](const SolutionRecord& a, const SolutionRecord& b) {
    if (a.estimates.fitness != b.estimates.fitness) {
      return a.estimates.fitness > b.estimates.fitness;
    }
    return a.id < b.id;
  };

  ChallengeOutcome out;
  while (!pending.empty() && out.to_reevaluate.size() < max_reevals) {
    SolutionRecord offspring = std::move(pending.front());
    pending.pop_front();

    const std::size_t cell = grid.bin(offspring.estimates.descriptor);
    const SolutionRecord* incumbent = grid.exposed_elite(cell);
    if (incumbent == nullptr) {
      if (grid.insert(std::move(offspring)).kind != InsertOutcome::Kind::Rejected) {
        ++out.admitted;
      }
    } else if (offspring.estimates.eval_count < incumbent->estimates.eval_count) {
      out.to_reevaluate.push_back({std::move(offspring), false});
    } else if (better(offspring, *incumbent)) {
      if (grid.insert(std::move(offspring)).kind != InsertOutcome::Kind::Rejected) {
        ++out.admitted;
      }
    } else {
      ++out.discarded;
      SolutionRecord extracted = grid.remove(incumbent->id);
      out.to_reevaluate.push_back({std::move(extracted), true});
    }
  }
  return out;
}

}  // namespace uqd
