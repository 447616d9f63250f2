#include "meshrl/oracle.hpp"

#include <stdexcept>

#include "meshrl/rewards.hpp"

namespace meshrl {

DelayModel surrogate_delays(const SystemModel& model) {
  return [&model](LoadPair loads, const Action& a) { return model.predict(loads, a); };
}

DelayModel ground_truth_delays(const GroundTruthParams& params) {
  return [p = params.without_noise()](LoadPair loads, const Action& a) {
    return expected_step(p, loads.l1, loads.l2, a).delays();
  };
}

OracleResult optimal_from_table(std::span<const Delays> table,
                                const ManagementObjective& objective, LoadPair loads,
                                const ActionGrid& grid, bool keep_table) {
  if (grid.size() == 0) throw std::invalid_argument("oracle needs a nonempty grid");
  if (table.size() != grid.size()) throw std::invalid_argument("delay table/grid size mismatch");
  OracleResult result;
  result.best_reward = -1.0;
  if (keep_table) result.reward_table.reserve(grid.size());
  for (ActionIndex i = 0; i < grid.size(); ++i) {
    const double r = reward(objective, loads, grid[i], table[i]);
    if (keep_table) result.reward_table.push_back(r);
    if (r > result.best_reward) {
      result.best_reward = r;
      result.best_index = i;
    }
  }
  result.best_action = grid[result.best_index];
  return result;
}

OracleResult optimal(const DelayModel& delays, const ManagementObjective& objective,
                     LoadPair loads, const ActionGrid& grid, bool keep_table) {
  std::vector<Delays> table;
  table.reserve(grid.size());
  for (const Action& a : grid) table.push_back(delays(loads, a));
  return optimal_from_table(table, objective, loads, grid, keep_table);
}

std::vector<double> optimal_reward_series(const DelayModel& delays,
                                          const ManagementObjective& objective,
                                          std::span<const LoadPair> loads,
                                          const ActionGrid& grid) {
  if (loads.empty()) throw std::invalid_argument("load sequence is empty");
  GridDelayCache cache(delays, grid);
  std::vector<double> out;
  out.reserve(loads.size());
  for (const LoadPair& l : loads) out.push_back(cache.optimal_for(objective, l).best_reward);
  return out;
}

GridDelayCache::GridDelayCache(DelayModel model, const ActionGrid& grid)
    : model_(std::move(model)), grid_(&grid) {}

const std::vector<Delays>& GridDelayCache::delays_for(LoadPair loads) {
  const Key key{loads.l1, loads.l2};
  auto it = table_.find(key);
  if (it == table_.end()) {
    std::vector<Delays> row;
    row.reserve(grid_->size());
    for (const Action& a : *grid_) row.push_back(model_(loads, a));
    it = table_.emplace(key, std::move(row)).first;
  }
  return it->second;
}

const OracleResult& GridDelayCache::optimal_for(const ManagementObjective& objective,
                                                LoadPair loads) {
  // Results are keyed by objective kind; a different parameterization of the
  // same kind invalidates the memo.
  if (objective_ && (objective_->kind != objective.kind ||
                     objective_->delay_bounds != objective.delay_bounds ||
                     objective_->utility_weights != objective.utility_weights ||
                     objective_->starvation_threshold != objective.starvation_threshold ||
                     objective_->delay_steepness != objective.delay_steepness ||
                     objective_->load_steepness != objective.load_steepness)) {
    optimal_.clear();
  }
  objective_ = objective;
  const std::pair<Key, int> key{{loads.l1, loads.l2}, scenario_id(objective.kind)};
  auto it = optimal_.find(key);
  if (it == optimal_.end())
    it = optimal_.emplace(key, optimal_from_table(delays_for(loads), objective, loads, *grid_))
             .first;
  return it->second;
}

}  // namespace meshrl
