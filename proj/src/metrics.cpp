#include "uqd/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "uqd/rng.hpp"

namespace uqd {

DepthGrid build_corrected_archive(const std::vector<const SolutionRecord*>& illusory_top,
                                  const GroundTruthSource& truth, const Task& task,
                                  GridSpec grid_spec, std::uint64_t seed) {
  grid_spec.depth = 1;
  DepthGrid corrected(std::move(grid_spec), AdditionPolicy{AdditionKind::Fitness});

  for (std::size_t i = 0; i < illusory_top.size(); ++i) {
    const SolutionRecord& source = *illusory_top[i];
    SolutionRecord record;
    record.id = source.id;
    record.genotype = source.genotype;
    record.birth_generation = source.birth_generation;
    record.parent_id = source.parent_id;

    if (truth.kind == GroundTruthSource::Kind::Analytic) {
      const EvalSample truth_sample = task.ground_truth(record.genotype);
      record.absorb({&truth_sample, 1}, truth.aggregator);
    } else {
      if (truth.reeval_count == 0) throw std::invalid_argument("empirical truth needs K >= 1");
      rng::Stream stream(seed, 0, source.id, rng::Purpose::Correction);
      std::vector<EvalSample> samples;
      samples.reserve(truth.reeval_count);
      for (std::size_t k = 0; k < truth.reeval_count; ++k) {
        samples.push_back(task.evaluate(record.genotype, stream));
      }
      record.absorb(samples, truth.aggregator);
    }
    corrected.insert(std::move(record));
  }
  return corrected;
}

QdScore qd_score(const std::vector<const SolutionRecord*>& top,
                 std::pair<double, double> fitness_bounds) {
  const auto [lo, hi] = fitness_bounds;
  if (!(lo < hi)) throw std::invalid_argument("fitness bounds must satisfy lo < hi");
  QdScore score;
  for (const SolutionRecord* record : top) {
    double v = (record->estimates.fitness - lo) / (hi - lo);
    if (v < 0.0) {
      v = 0.0;
      ++score.clamped;
    } else if (v > 1.0) {
      v = 1.0;
      ++score.clamped;
    }
    score.value += v;
  }
  return score;
}

QdScore qd_score(const DepthGrid& grid, std::pair<double, double> fitness_bounds) {
  return qd_score(grid.top_layer(), fitness_bounds);
}

double average_samples(const std::vector<const SolutionRecord*>& top) {
  if (top.empty()) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  std::size_t k = 0;
  for (const SolutionRecord* record : top) {
    ++k;
    mean += (static_cast<double>(record->estimates.eval_count) - mean) / static_cast<double>(k);
  }
  return mean;
}

double coverage(const DepthGrid& grid) {
  return static_cast<double>(grid.occupied_cell_count()) /
         static_cast<double>(grid.cell_count());
}

}  // namespace uqd
