#include "meshrl/ground_truth.hpp"

#include <algorithm>
#include <stdexcept>

#include "meshrl/rng.hpp"

namespace meshrl {

void GroundTruthParams::validate() const {
  for (double c : capacity)
    if (!(c > 0.0)) throw std::invalid_argument("node capacity must be > 0");
  for (const auto& row : work_cost)
    for (double w : row)
      if (!(w > 0.0)) throw std::invalid_argument("work cost must be > 0");
  for (const auto& row : base_delay)
    for (double d : row) {
      if (!(d >= 0.0)) throw std::invalid_argument("base delay must be >= 0");
      if (!(max_delay > d)) throw std::invalid_argument("max_delay must exceed every base delay");
    }
  if (!(front_delay >= 0.0)) throw std::invalid_argument("front delay must be >= 0");
  if (!(noise_rel >= 0.0)) throw std::invalid_argument("noise coefficient must be >= 0");
}

double node_delay(const GroundTruthParams& params, std::size_t service, std::size_t node,
                  double rho) {
  const double base = params.base_delay.at(service).at(node);
  return std::min(params.max_delay, base / std::max(kSaturationGuard, 1.0 - rho));
}

std::array<double, kNumNodes> utilization(const GroundTruthParams& params, double l1, double l2,
                                          const Action& action) {
  const std::array<double, kNumServices> carried{carried_load(l1, action.b1),
                                                 carried_load(l2, action.b2)};
  std::array<double, kNumNodes> rho{};
  for (std::size_t j = 0; j < kNumNodes; ++j) {
    double work = 0.0;
    for (std::size_t i = 0; i < kNumServices; ++i)
      work += params.work_cost[i][j] * carried[i] * action.routing(i, j);
    rho[j] = work / params.capacity[j];
  }
  return rho;
}

StepOutcome expected_step(const GroundTruthParams& params, double l1, double l2,
                          const Action& action) {
  if (!(l1 >= 0.0) || !(l2 >= 0.0)) throw std::invalid_argument("offered load must be >= 0");
  action.validate();
  const auto rho = utilization(params, l1, l2, action);
  std::array<double, kNumServices> d{};
  for (std::size_t i = 0; i < kNumServices; ++i) {
    d[i] = params.front_delay;
    for (std::size_t j = 0; j < kNumNodes; ++j)
      d[i] += action.routing(i, j) * node_delay(params, i, j, rho[j]);
  }
  return {d[0], d[1], carried_load(l1, action.b1), carried_load(l2, action.b2)};
}

StepOutcome step(const GroundTruthParams& params, double l1, double l2, const Action& action,
                 std::size_t step_index) {
  StepOutcome out = expected_step(params, l1, l2, action);
  if (params.noise_rel > 0.0) {
    const std::uint64_t stream = derive_seed(params.seed, "delay-noise");
    const double hi = params.front_delay + params.max_delay;
    auto perturb = [&](double d, std::uint64_t service) {
      const double xi = counter_normal(params.seed, stream + service, step_index);
      return std::clamp(d * (1.0 + params.noise_rel * xi), params.front_delay, hi);
    };
    out.d1 = perturb(out.d1, 0);
    out.d2 = perturb(out.d2, 1);
  }
  return out;
}

}  // namespace meshrl
