#pragma once

#include "meshrl/oracle.hpp"
#include "meshrl/sysmodel.hpp"

namespace meshrl {

/// Surrogate-backed environment: the next delays are f(loads, action).
/// Also answers the per-load-pair optimum under the same model.
class Simulator {
 public:
  Simulator(const SystemModel& model, const ActionGrid& grid)
      : model_(&model), cache_(surrogate_delays(model), grid) {}

  /// Generic delay model (tests plug in closed-form models here).
  Simulator(DelayModel delays, const ActionGrid& grid) : cache_(std::move(delays), grid) {}

  Delays step(LoadPair loads, ActionIndex action) { return cache_.delays(loads, action); }
  const OracleResult& optimal(const ManagementObjective& objective, LoadPair loads) {
    return cache_.optimal_for(objective, loads);
  }
  const ActionGrid& grid() const noexcept { return cache_.grid(); }
  const SystemModel* model() const noexcept { return model_; }

 private:
  const SystemModel* model_ = nullptr;
  GridDelayCache cache_;
};

}  // namespace meshrl
