#pragma once

#include "meshrl/types.hpp"

namespace meshrl {

enum class Orientation { PenalizeAbove, PenalizeBelow };

/// Smooth tanh step around a threshold.
struct RewardShape {
  double threshold = 0.1;
  double steepness = 50.0;
  Orientation orientation = Orientation::PenalizeAbove;

  double operator()(double x) const;
  void validate() const;
};

/// 0.5 (1 - tanh(k (d - O))): near 1 well below the bound, 0.5 at it.
double delay_reward(double delay, double bound, double steepness);

/// 0.5 (1 + tanh(k (lc - l_min))): rewards carried load above l_min.
double throughput_reward(double carried, double threshold, double steepness);

/// Reward of one step under the given objective.
///   MO1: lc1 r1 + lc2 r2
///   MO2: u1 lc1 r1 + u2 lc2 r2
///   MO3: lc2 (r3(lc1) + r2)
double reward(const ManagementObjective& objective, double l1, double l2, const Action& action,
              double d1, double d2);

inline double reward(const ManagementObjective& objective, LoadPair loads, const Action& action,
                     Delays delays) {
  return reward(objective, loads.l1, loads.l2, action, delays.d1, delays.d2);
}

/// Upper bound on the reward when both offered loads are <= max_load.
double reward_upper_bound(const ManagementObjective& objective, double max_load);

}  // namespace meshrl
