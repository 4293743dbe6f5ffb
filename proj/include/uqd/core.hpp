#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uqd {

using Genotype = std::vector<double>;

// One stochastic evaluation draw. Descriptor components are clamped to [0,1]
// at evaluation time so binning is always defined.
struct EvalSample {
  double fitness = 0.0;
  std::vector<double> descriptor;
};

enum class Aggregator { Mean, Median };

std::string to_string(Aggregator aggregator);
Aggregator aggregator_from_string(const std::string& text);

// FIFO buffer of raw evaluation results. capacity 0 means unbounded; with a
// capacity set, the oldest samples are evicted first.
class SampleBuffer {
 public:
  SampleBuffer() = default;
  explicit SampleBuffer(std::size_t capacity) : capacity_(capacity) {}

  void append(const EvalSample& sample);
  void append(std::span<const EvalSample> samples);

  const std::vector<EvalSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::vector<EvalSample> samples_;
  std::size_t capacity_ = 0;
};

struct Estimates {
  double fitness = 0.0;
  std::vector<double> descriptor;
  std::optional<double> spread;  // engaged iff two or more samples exist
  std::size_t eval_count = 0;
};

// Aggregates a buffer into point estimates. Mean uses a running (Welford)
// update so a constant sample sequence reproduces its value bit-exactly.
Estimates estimate_from_buffer(const SampleBuffer& buffer, Aggregator aggregator);

// Mean Euclidean distance of the descriptor samples to their component-wise
// median; lower spread = higher reproducibility. nullopt below two samples.
std::optional<double> reproducibility_spread(const SampleBuffer& buffer);

struct SolutionRecord {
  std::uint64_t id = 0;
  Genotype genotype;
  SampleBuffer buffer;
  Estimates estimates;
  std::size_t birth_generation = 0;
  std::optional<std::uint64_t> parent_id;

  void absorb(std::span<const EvalSample> samples, Aggregator aggregator);
};

}  // namespace uqd
