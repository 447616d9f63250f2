#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "meshrl/types.hpp"

namespace meshrl {

/// Parameters of the synthetic environment standing in for the physical
/// testbed. Indexing is [service][node], both 0-based.
struct GroundTruthParams {
  std::array<double, kNumNodes> capacity{30.0, 30.0};  // work-units/second
  std::array<std::array<double, kNumNodes>, kNumServices> work_cost{{{1.0, 1.0}, {2.0, 2.0}}};
  std::array<std::array<double, kNumNodes>, kNumServices> base_delay{{{0.02, 0.02}, {0.02, 0.02}}};
  double front_delay = 0.005;
  double max_delay = 2.0;
  double noise_rel = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
  GroundTruthParams without_noise() const {
    GroundTruthParams p = *this;
    p.noise_rel = 0.0;
    return p;
  }
};

struct StepOutcome {
  double d1 = 0.0;
  double d2 = 0.0;
  double lc1 = 0.0;
  double lc2 = 0.0;

  Delays delays() const noexcept { return {d1, d2}; }
};

inline constexpr double kSaturationGuard = 1e-3;

/// Processing delay of service i on node j at utilization rho:
/// min(max_delay, base / max(guard, 1 - rho)).
double node_delay(const GroundTruthParams& params, std::size_t service, std::size_t node,
                  double rho);

/// Per-node utilization sum_i w_ij * l_i (1 - b_i) p_ij / C_j.
std::array<double, kNumNodes> utilization(const GroundTruthParams& params, double l1, double l2,
                                          const Action& action);

/// Noise-free outcome (expected delays).
StepOutcome expected_step(const GroundTruthParams& params, double l1, double l2,
                          const Action& action);

/// Outcome with multiplicative Gaussian noise; deterministic in (seed, step)
/// and independent of anything that happened at earlier steps.
StepOutcome step(const GroundTruthParams& params, double l1, double l2, const Action& action,
                 std::size_t step_index);

}  // namespace meshrl
