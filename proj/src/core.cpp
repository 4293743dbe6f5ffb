#include "uqd/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqd {

std::string to_string(Aggregator aggregator) {
  return aggregator == Aggregator::Mean ? "mean" : "median";
}

Aggregator aggregator_from_string(const std::string& text) {
  if (text == "mean") return Aggregator::Mean;
  if (text == "median") return Aggregator::Median;
  throw std::invalid_argument("unknown aggregator: " + text);
}

void SampleBuffer::append(const EvalSample& sample) {
  if (capacity_ > 0 && samples_.size() == capacity_) {
    samples_.erase(samples_.begin());
  }
  samples_.push_back(sample);
}

void SampleBuffer::append(std::span<const EvalSample> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("append requires at least one sample");
  }
  for (const auto& s : samples) append(s);
}

namespace {

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<double> component_medians(const std::vector<EvalSample>& samples) {
  const std::size_t dims = samples.front().descriptor.size();
  std::vector<double> medians(dims);
  std::vector<double> column(samples.size());
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < samples.size(); ++i) column[i] = samples[i].descriptor[d];
    medians[d] = median_of(column);
  }
  return medians;
}

}  // namespace

Estimates estimate_from_buffer(const SampleBuffer& buffer, Aggregator aggregator) {
  const auto& samples = buffer.samples();
  if (samples.empty()) throw std::invalid_argument("no evaluations");

  const std::size_t dims = samples.front().descriptor.size();
  for (const auto& s : samples) {
    if (s.descriptor.size() != dims) {
      throw std::invalid_argument("inconsistent descriptor dimensions in buffer");
    }
  }

  Estimates est;
  est.eval_count = samples.size();
  est.descriptor.assign(dims, 0.0);

  if (aggregator == Aggregator::Mean) {
    double fitness_mean = 0.0;
    std::vector<double> descriptor_mean(dims, 0.0);
    std::size_t k = 0;
    for (const auto& s : samples) {
      ++k;
      fitness_mean += (s.fitness - fitness_mean) / static_cast<double>(k);
      for (std::size_t d = 0; d < dims; ++d) {
        descriptor_mean[d] += (s.descriptor[d] - descriptor_mean[d]) / static_cast<double>(k);
      }
    }
    est.fitness = fitness_mean;
    est.descriptor = std::move(descriptor_mean);
  } else {
    std::vector<double> fitnesses(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) fitnesses[i] = samples[i].fitness;
    est.fitness = median_of(std::move(fitnesses));
    est.descriptor = component_medians(samples);
  }

  est.spread = reproducibility_spread(buffer);
  return est;
}

std::optional<double> reproducibility_spread(const SampleBuffer& buffer) {
  const auto& samples = buffer.samples();
  if (samples.size() < 2) return std::nullopt;

  const auto medians = component_medians(samples);
  double total = 0.0;
  for (const auto& s : samples) {
    double sq = 0.0;
    for (std::size_t d = 0; d < medians.size(); ++d) {
      const double diff = s.descriptor[d] - medians[d];
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(samples.size());
}

void SolutionRecord::absorb(std::span<const EvalSample> samples, Aggregator aggregator) {
  buffer.append(samples);
  estimates = estimate_from_buffer(buffer, aggregator);
}

}  // namespace uqd
