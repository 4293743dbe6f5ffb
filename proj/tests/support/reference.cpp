#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uqd/rng.hpp"

namespace refimpl {

double naive_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

double naive_median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

namespace {

// Regularized incomplete gamma P(a, x) by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized incomplete gamma Q(a, x) by continued fraction (x >= a + 1).
double gamma_q_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  const double a = dof / 2.0;
  const double xx = x / 2.0;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_fraction(a, xx);
}

double rank_sum_p_greater(const std::vector<double>& greater,
                          const std::vector<double>& lesser) {
  const std::size_t n = greater.size();
  const std::size_t m = lesser.size();
  if (n == 0 || m == 0) throw std::invalid_argument("rank-sum needs non-empty groups");

  // U counts pairs where the supposedly-greater sample is in fact smaller,
  // with half-credit for ties; small U means strong evidence of dominance.
  double u_observed = 0.0;
  for (double a : greater) {
    for (double b : lesser) {
      if (a < b) u_observed += 1.0;
      else if (a == b) u_observed += 0.5;
    }
  }

  // Exact null: every placement of the n group positions among n + m ranks is
  // equally likely; U = sum(positions) - n(n-1)/2 for the positions of the
  // `lesser`-dominated group. Enumerate via a selection mask.
  std::vector<bool> mask(n + m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
  std::sort(mask.begin(), mask.end());  // lexicographically first arrangement

  std::size_t total = 0;
  std::size_t at_most = 0;
  do {
    double u = 0.0;
    std::size_t seen_other = 0;
    for (std::size_t pos = 0; pos < mask.size(); ++pos) {
      if (mask[pos]) {
        u += static_cast<double>(seen_other);  // `lesser` samples below this one
      } else {
        ++seen_other;
      }
    }
    // u currently counts lesser-below-greater pairs; invert to match U above.
    const double u_inverted = static_cast<double>(n * m) - u;
    ++total;
    if (u_inverted <= u_observed) ++at_most;
  } while (std::next_permutation(mask.begin(), mask.end()));

  return static_cast<double>(at_most) / static_cast<double>(total);
}

RefArchive::RefArchive(std::vector<std::size_t> dims, std::size_t depth)
    : dims_(std::move(dims)), depth_(depth) {
  if (dims_.empty() || depth_ == 0) throw std::invalid_argument("bad archive shape");
}

std::size_t RefArchive::bin(const std::vector<double>& descriptor) const {
  if (descriptor.size() != dims_.size()) {
    throw std::invalid_argument("descriptor dimension mismatch");
  }
  std::size_t index = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    auto i = static_cast<long long>(std::floor(descriptor[d] * static_cast<double>(dims_[d])));
    i = std::clamp(i, 0LL, static_cast<long long>(dims_[d]) - 1);
    index = index * dims_[d] + static_cast<std::size_t>(i);
  }
  return index;
}

bool RefArchive::insert(RefEntry entry) {
  auto& slots = cells_[bin(entry.descriptor)];
  const auto better = [](const RefEntry& a, const RefEntry& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.id < b.id;
  };
  std::size_t pos = 0;
  while (pos < slots.size() && !better(entry, slots[pos])) ++pos;
  if (pos == slots.size() && slots.size() >= depth_) return false;
  slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(pos), std::move(entry));
  if (slots.size() > depth_) slots.pop_back();
  return true;
}

std::size_t RefArchive::slot_count() const {
  std::size_t count = 0;
  for (const auto& [cell, slots] : cells_) count += slots.size();
  return count;
}

std::vector<std::map<std::size_t, RefEntry>> run_reference_map_elites(
    const uqd::Task& task, std::vector<std::size_t> dims, std::size_t sampling_size,
    std::size_t generations, std::uint64_t seed, double sigma_iso, double sigma_line) {
  RefArchive archive(dims, 1);
  std::vector<std::map<std::size_t, RefEntry>> history;
  history.reserve(generations);
  std::uint64_t next_id = 0;

  for (std::size_t gen = 0; gen < generations; ++gen) {
    std::vector<uqd::Genotype> children;
    children.reserve(sampling_size);

    if (archive.cells().empty()) {
      for (std::size_t j = 0; j < sampling_size; ++j) {
        uqd::rng::Stream stream(seed, gen, j, uqd::rng::Purpose::Init);
        uqd::Genotype g(task.genotype_dim);
        for (double& x : g) x = stream.uniform01();
        children.push_back(std::move(g));
      }
    } else {
      std::vector<const RefEntry*> top;
      top.reserve(archive.cells().size());
      for (const auto& [cell, slots] : archive.cells()) top.push_back(&slots.front());

      uqd::rng::Stream select_stream(seed, gen, 0, uqd::rng::Purpose::Select);
      std::vector<const RefEntry*> picks(2 * sampling_size);
      for (auto& p : picks) p = top[select_stream.uniform_index(top.size())];

      for (std::size_t j = 0; j < sampling_size; ++j) {
        uqd::rng::Stream stream(seed, gen, j, uqd::rng::Purpose::Variation);
        const uqd::Genotype& p1 = picks[2 * j]->genotype;
        const uqd::Genotype& p2 = picks[2 * j + 1]->genotype;
        uqd::Genotype child(p1.size());
        for (std::size_t i = 0; i < p1.size(); ++i) {
          child[i] = p1[i] + sigma_iso * stream.gaussian();
        }
        const double line = sigma_line * stream.gaussian();
        for (std::size_t i = 0; i < p1.size(); ++i) child[i] += line * (p2[i] - p1[i]);
        for (double& x : child) x = std::clamp(x, 0.0, 1.0);
        children.push_back(std::move(child));
      }
    }

    for (auto& g : children) {
      auto sample = task.ground_truth(g);
      for (double& d : sample.descriptor) d = std::clamp(d, 0.0, 1.0);
      archive.insert({next_id++, sample.fitness, std::move(sample.descriptor), std::move(g)});
    }

    std::map<std::size_t, RefEntry> snapshot;
    for (const auto& [cell, slots] : archive.cells()) snapshot.emplace(cell, slots.front());
    history.push_back(std::move(snapshot));
  }
  return history;
}

}  // namespace refimpl
