#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace uqd::rng {

// splitmix64 finalizer; used to derive independent substream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Purpose : std::uint64_t {
  Init = 1,
  Select = 2,
  Variation = 3,
  Eval = 4,
  Extract = 5,
  Correction = 6,
};

constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t generation,
                                      std::uint64_t slot, Purpose purpose) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ generation);
  h = mix64(h ^ slot);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

// One logical consumer per stream. The draw order within a stream is part of
// the reproducibility contract: results are identical regardless of worker
// count because every (generation, slot, purpose) triple owns its own stream.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t slot, Purpose purpose)
      : engine_(substream_key(seed, generation, slot, purpose)) {}

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double gaussian() { return normal_(engine_); }

  std::size_t uniform_index(std::size_t n) {
    assert(n > 0);
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace uqd::rng
