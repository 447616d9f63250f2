#include "meshrl/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace meshrl {

double RewardShape::operator()(double x) const {
  return orientation == Orientation::PenalizeAbove
             ? delay_reward(x, threshold, steepness)
             : throughput_reward(x, threshold, steepness);
}

void RewardShape::validate() const {
  if (!(steepness > 0.0)) throw std::invalid_argument("reward steepness must be > 0");
  if (orientation == Orientation::PenalizeAbove && !(threshold > 0.0))
    throw std::invalid_argument("delay threshold must be > 0");
}

double delay_reward(double delay, double bound, double steepness) {
  return 0.5 * (1.0 - std::tanh(steepness * (delay - bound)));
}

double throughput_reward(double carried, double threshold, double steepness) {
  return 0.5 * (1.0 + std::tanh(steepness * (carried - threshold)));
}

double reward(const ManagementObjective& mo, double l1, double l2, const Action& action,
              double d1, double d2) {
  const double lc1 = carried_load(l1, action.b1);
  const double lc2 = carried_load(l2, action.b2);
  const double r1 = delay_reward(d1, mo.delay_bounds[0], mo.delay_steepness);
  const double r2 = delay_reward(d2, mo.delay_bounds[1], mo.delay_steepness);
  switch (mo.kind) {
    case ObjectiveKind::MO1:
      return lc1 * r1 + lc2 * r2;
    case ObjectiveKind::MO2:
      return mo.utility_weights[0] * lc1 * r1 + mo.utility_weights[1] * lc2 * r2;
    case ObjectiveKind::MO3: {
      const double r3 = throughput_reward(lc1, mo.starvation_threshold, mo.load_steepness);
      return lc2 * (r3 + r2);
    }
  }
  throw std::invalid_argument("unknown objective kind");
}

double reward_upper_bound(const ManagementObjective& mo, double max_load) {
  switch (mo.kind) {
    case ObjectiveKind::MO1: return 2.0 * max_load;
    case ObjectiveKind::MO2: return (mo.utility_weights[0] + mo.utility_weights[1]) * max_load;
    case ObjectiveKind::MO3: return 2.0 * max_load;
  }
  throw std::invalid_argument("unknown objective kind");
}

}  // namespace meshrl
