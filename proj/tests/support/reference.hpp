#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "uqd/core.hpp"
#include "uqd/tasks.hpp"

// Independent oracles for the test suite: a dictionary-backed archive, a
// from-scratch MAP-Elites loop that shares only the rng substream contract,
// naive second-pass estimators, and exact small-sample statistics.
namespace refimpl {

double naive_mean(const std::vector<double>& xs);
double naive_median(std::vector<double> xs);

// Upper-tail probability Q(x; dof) of a chi-square variable.
double chi_square_sf(double x, double dof);

// One-sided exact Mann-Whitney p-value for "samples in `greater` tend to be
// larger than samples in `lesser`". Exact null over all rank arrangements;
// intended for the small group sizes used here (n + m <= ~14).
double rank_sum_p_greater(const std::vector<double>& greater,
                          const std::vector<double>& lesser);

struct RefEntry {
  std::uint64_t id = 0;
  double fitness = 0.0;
  std::vector<double> descriptor;
  uqd::Genotype genotype;
};

// Fitness-ordered archive over a unit-bounds grid, holding up to `depth`
// entries per cell, better fitness first, ties won by the lower id.
class RefArchive {
 public:
  RefArchive(std::vector<std::size_t> dims, std::size_t depth);

  std::size_t bin(const std::vector<double>& descriptor) const;
  // Returns true when the entry is stored (possibly evicting the cell worst).
  bool insert(RefEntry entry);

  const std::map<std::size_t, std::vector<RefEntry>>& cells() const { return cells_; }
  std::size_t slot_count() const;

 private:
  std::vector<std::size_t> dims_;
  std::size_t depth_;
  std::map<std::size_t, std::vector<RefEntry>> cells_;
};

// Uniform-selection, iso-line, depth-1, one-sample-per-solution MAP-Elites
// on a noise-free task, following the documented substream scheme
// (Init/Select/Variation keyed by generation and slot). Returns the archive
// after each generation, keyed by cell index.
std::vector<std::map<std::size_t, RefEntry>> run_reference_map_elites(
    const uqd::Task& task, std::vector<std::size_t> dims, std::size_t sampling_size,
    std::size_t generations, std::uint64_t seed, double sigma_iso, double sigma_line);

}  // namespace refimpl
