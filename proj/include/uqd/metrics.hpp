#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "uqd/container.hpp"
#include "uqd/core.hpp"
#include "uqd/tasks.hpp"

namespace uqd {

struct GroundTruthSource {
  enum class Kind { Analytic, Empirical };

  Kind kind = Kind::Analytic;
  std::size_t reeval_count = 512;  // Empirical only
  Aggregator aggregator = Aggregator::Median;
};

// Re-places the top layer of a finished run into a fresh depth-1
// fitness-ordered grid using ground-truth estimates, so that lucky solutions
// are scored by what they actually do. Empirical truth draws reeval_count
// fresh evaluations per record on a correction-only rng stream.
DepthGrid build_corrected_archive(const std::vector<const SolutionRecord*>& illusory_top,
                                  const GroundTruthSource& truth, const Task& task,
                                  GridSpec grid_spec, std::uint64_t seed);

struct QdScore {
  double value = 0.0;
  std::size_t clamped = 0;  // cells whose fitness fell outside the bounds
};

// Sum over occupied cells of (f - f_min)/(f_max - f_min), clamped to [0,1].
QdScore qd_score(const std::vector<const SolutionRecord*>& top,
                 std::pair<double, double> fitness_bounds);
QdScore qd_score(const DepthGrid& grid, std::pair<double, double> fitness_bounds);

// Mean eval_count over the records; NaN for an empty list.
double average_samples(const std::vector<const SolutionRecord*>& top);

double coverage(const DepthGrid& grid);

}  // namespace uqd
