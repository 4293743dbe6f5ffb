#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <vector>

#include "uqd/container.hpp"
#include "uqd/core.hpp"
#include "uqd/rng.hpp"

namespace uqd {

enum class SelectionKind { UniformTop, FitnessProportionalDepth };
enum class VariationKind { IsoLine, Gaussian };
enum class ExtractionKind { None, FullArchive, RankWeighted, AdaptiveChallenge };

std::string to_string(SelectionKind kind);
std::string to_string(VariationKind kind);
std::string to_string(ExtractionKind kind);

struct VariationParams {
  VariationKind kind = VariationKind::IsoLine;
  double sigma_iso = 0.005;
  double sigma_line = 0.05;
  double sigma = 0.1;  // Gaussian only

  // Parent genotypes consumed per offspring.
  std::size_t arity() const { return kind == VariationKind::IsoLine ? 2 : 1; }
};

struct ExtractionParams {
  ExtractionKind kind = ExtractionKind::None;
  double proportion = 0.0;  // p, RankWeighted only
  double base = 2.0;        // RankWeighted only
};

struct ParentPick {
  Genotype genotype;
  std::uint64_t source_id = 0;
};

// k independent uniform draws (with replacement) over the top layer.
// Draw order: one uniform_index per pick, in pick order.
std::vector<ParentPick> select_uniform_top(const DepthGrid& grid, std::size_t k,
                                           rng::Stream& stream);

// Per draw: a uniform non-empty cell, then a within-cell pick with weight
// (f - f_min_cell + epsilon). Draw order: uniform_index then uniform01.
std::vector<ParentPick> select_fitness_proportional_depth(const DepthGrid& grid, std::size_t k,
                                                          rng::Stream& stream);

// Draw order per offspring: one gaussian per component for the iso term,
// then one gaussian for the line term. Result clipped to [0,1]^G.
Genotype variation_iso_line(const Genotype& p1, const Genotype& p2, double sigma_iso,
                            double sigma_line, rng::Stream& stream);

Genotype variation_gaussian(const Genotype& parent, double sigma, rng::Stream& stream);

// Sequential weighted draws without replacement over all occupied slots,
// slot at in-cell rank r carrying weight base^(-r). Weights are recomputed
// after each removal since shift-up changes ranks. One uniform01 per draw;
// slots scanned in ascending cell order, top-first within a cell.
std::vector<SolutionRecord> extract_rank_weighted(DepthGrid& grid, std::size_t count,
                                                  double base, rng::Stream& stream);

// Empties the grid, depth included.
std::vector<SolutionRecord> extract_full_archive(DepthGrid& grid);

struct ChallengeItem {
  SolutionRecord record;
  bool from_grid = false;  // extracted incumbent vs. pending offspring
};

struct ChallengeOutcome {
  std::vector<ChallengeItem> to_reevaluate;
  std::size_t admitted = 0;
  std::size_t discarded = 0;
};

// Resolves pending offspring against the top incumbents of their cells:
// empty cell admits; fewer evaluations than the incumbent re-queues the
// offspring; equal counts admit the better estimate or, when the offspring
// loses, discard it and extract the incumbent for one re-evaluation.
// Stops once max_reevals records are queued; unprocessed items stay pending.
ChallengeOutcome resolve_adaptive_challenges(DepthGrid& grid,
                                             std::deque<SolutionRecord>& pending,
                                             std::size_t max_reevals);

}  // namespace uqd
