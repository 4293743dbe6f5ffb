#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uqd/core.hpp"
#include "uqd/rng.hpp"

namespace uqd {

struct NoiseModel {
  double fitness_sigma = 0.0;     // stddev of gaussian fitness noise
  double descriptor_sigma = 0.0;  // stddev per descriptor component

  bool none() const { return fitness_sigma == 0.0 && descriptor_sigma == 0.0; }
};

// A benchmark with analytic ground truth. Evaluation is pure given the
// genotype and an rng stream; noise draw order is fitness first, then one
// gaussian per descriptor component. Descriptors are clamped to [0,1].
struct Task {
  enum class Family { Arm, Sphere };

  std::string name;
  Family family = Family::Arm;
  std::size_t genotype_dim = 8;
  std::size_t descriptor_dim = 2;
  std::pair<double, double> fitness_bounds = {-0.25, 0.0};
  NoiseModel noise;

  EvalSample ground_truth(const Genotype& genotype) const;
  EvalSample evaluate(const Genotype& genotype, rng::Stream& stream) const;
};

// Planar redundant arm, 8 equal links of total length 1, joint i turning
// pi*(2g_i - 1)/8 from the previous link. Fitness is the negated variance of
// the genotype; descriptor is the end-effector position mapped into [0,1]^2.
EvalSample arm_ground_truth(const Genotype& genotype);

// Negated squared distance to 0.5 per component; descriptor (g_1, g_2).
Task sphere_task(std::size_t genotype_dim, NoiseModel noise = {});

// Registry: arm_clean, arm_fit_noise, arm_desc_noise, sphere.
Task make_task(const std::string& name);
std::vector<std::string> task_names();

}  // namespace uqd
