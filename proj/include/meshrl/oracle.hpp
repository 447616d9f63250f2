#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "meshrl/ground_truth.hpp"
#include "meshrl/sysmodel.hpp"
#include "meshrl/types.hpp"

namespace meshrl {

/// Any map (loads, action) -> expected delays.
using DelayModel = std::function<Delays(LoadPair, const Action&)>;

DelayModel surrogate_delays(const SystemModel& model);
/// Noise-free ground-truth delays.
DelayModel ground_truth_delays(const GroundTruthParams& params);

struct OracleResult {
  ActionIndex best_index = 0;
  Action best_action;
  double best_reward = 0.0;
  std::vector<double> reward_table;  // filled only when requested
};

/// Exhaustive argmax of the reward over the grid; ties go to the lowest index.
OracleResult optimal(const DelayModel& delays, const ManagementObjective& objective, LoadPair loads,
                     const ActionGrid& grid, bool keep_table = false);

/// Same, over a precomputed per-action delay table (table[i] belongs to grid[i]).
OracleResult optimal_from_table(std::span<const Delays> table,
                                const ManagementObjective& objective, LoadPair loads,
                                const ActionGrid& grid, bool keep_table = false);

std::vector<double> optimal_reward_series(const DelayModel& delays,
                                          const ManagementObjective& objective,
                                          std::span<const LoadPair> loads, const ActionGrid& grid);

/// Memoizes a delay model over the whole grid per distinct load pair, so the
/// oracle and a simulator stepping the same loads share one evaluation.
/// Not thread-safe; give each worker its own cache.
class GridDelayCache {
 public:
  GridDelayCache(DelayModel model, const ActionGrid& grid);

  const std::vector<Delays>& delays_for(LoadPair loads);
  Delays delays(LoadPair loads, ActionIndex action) { return delays_for(loads)[action]; }
  /// Oracle for `objective`, memoized per load pair.
  const OracleResult& optimal_for(const ManagementObjective& objective, LoadPair loads);

  const ActionGrid& grid() const noexcept { return *grid_; }
  std::size_t entries() const noexcept { return table_.size(); }

 private:
  using Key = std::pair<double, double>;
  DelayModel model_;
  const ActionGrid* grid_;
  std::map<Key, std::vector<Delays>> table_;
  std::map<std::pair<Key, int>, OracleResult> optimal_;
  std::optional<ManagementObjective> objective_;
};

}  // namespace meshrl
