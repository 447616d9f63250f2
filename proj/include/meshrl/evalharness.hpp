#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "meshrl/agent.hpp"
#include "meshrl/ground_truth.hpp"
#include "meshrl/loadgen.hpp"
#include "meshrl/oracle.hpp"
#include "meshrl/simulator.hpp"
#include "meshrl/sysmodel.hpp"
#include "meshrl/types.hpp"

namespace meshrl {

enum class EnvironmentKind { Simulation, GroundTruth };
/// Delay model the per-step optimal reward is computed with.
enum class ReferenceKind { Surrogate, GroundTruth };

const char* to_string(EnvironmentKind kind);
const char* to_string(ReferenceKind kind);
EnvironmentKind environment_from_string(const std::string& name);
ReferenceKind reference_from_string(const std::string& name);
/// Surrogate for the simulator, ground truth for the ground-truth environment.
ReferenceKind default_reference(EnvironmentKind env);

struct NormalizedReward {
  double value = 1.0;
  bool flagged = false;  // optimum was exceeded or was zero with a positive reward
};

/// obtained / optimal, with 0/0 -> 1. Negative optimal is rejected.
NormalizedReward normalized_reward(double obtained, double optimal);

/// Decision rule evaluated by the harness.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionIndex select(const MeshState& state, std::size_t step) = 0;
};

/// Trained network, greedy by default.
class NetPolicy final : public Policy {
 public:
  NetPolicy(const PolicyNet& net, ActMode mode = ActMode::Greedy, std::uint64_t seed = 0)
      : net_(&net), mode_(mode), rng_(seed) {}
  ActionIndex select(const MeshState& state, std::size_t step) override;

 private:
  const PolicyNet* net_;
  ActMode mode_;
  std::mt19937_64 rng_;
};

/// Plays the argmax of the given delay model at the current loads.
class OraclePolicy final : public Policy {
 public:
  OraclePolicy(DelayModel delays, const ActionGrid& grid, ManagementObjective objective)
      : cache_(std::move(delays), grid), objective_(objective) {}
  ActionIndex select(const MeshState& state, std::size_t step) override;

 private:
  GridDelayCache cache_;
  ManagementObjective objective_;
};

/// Uniformly random grid actions; a pure function of (seed, step).
class RandomPolicy final : public Policy {
 public:
  RandomPolicy(std::size_t num_actions, std::uint64_t seed)
      : num_actions_(num_actions), seed_(seed) {}
  ActionIndex select(const MeshState& state, std::size_t step) override;

 private:
  std::size_t num_actions_;
  std::uint64_t seed_;
};

struct EvaluationReport {
  int scenario = 0;
  EnvironmentKind environment = EnvironmentKind::Simulation;
  LoadKind load_pattern = LoadKind::Random;
  ReferenceKind reference = ReferenceKind::Surrogate;
  std::size_t steps = 0;
  double anr = 0.0;
  std::vector<double> nr_series;
  std::vector<bool> flagged;
  std::vector<EpisodeRecord> records;  // loads, action, delays, carried, rewards
  std::vector<ActionIndex> action_indices;

  std::size_t flagged_count() const;
};

/// Runs policies against the surrogate simulator or the ground truth.
/// Keeps per-load-pair surrogate tables between runs.
class Evaluator {
 public:
  Evaluator(const SystemModel& model, GroundTruthParams ground_truth, const ActionGrid& grid);

  EvaluationReport run_scenario(Policy& policy, EnvironmentKind env,
                                const ManagementObjective& objective,
                                const LoadPattern& load_pattern, std::size_t steps,
                                ReferenceKind reference, std::uint64_t seed = 0);
  EvaluationReport run_scenario(Policy& policy, EnvironmentKind env,
                                const ManagementObjective& objective,
                                const LoadPattern& load_pattern, std::size_t steps) {
    return run_scenario(policy, env, objective, load_pattern, steps, default_reference(env));
  }

  EvaluationReport random_baseline(EnvironmentKind env, const ManagementObjective& objective,
                                   const LoadPattern& load_pattern, std::size_t steps,
                                   std::uint64_t seed);

  Simulator& simulator() noexcept { return simulator_; }
  const ActionGrid& grid() const noexcept { return *grid_; }
  const GroundTruthParams& ground_truth() const noexcept { return ground_truth_; }

 private:
  const SystemModel* model_;
  GroundTruthParams ground_truth_;
  const ActionGrid* grid_;
  Simulator simulator_;
};

/// Per-step blocking of two policies on identical load draws.
struct ContrastReport {
  std::vector<LoadPair> loads;
  std::vector<Action> first;
  std::vector<Action> second;
};

ContrastReport objective_contrast(Policy& first, Policy& second, Evaluator& evaluator,
                                  const LoadPattern& load_pattern, std::size_t steps,
                                  EnvironmentKind env = EnvironmentKind::Simulation);

struct BlockingSummary {
  double b1 = 0.0;
  double b2 = 0.0;
  std::size_t steps = 0;
};

/// Mean blocking over peak steps, i.e. steps whose total offered load is at
/// least `fraction` of the window maximum.
BlockingSummary peak_blocking(const std::vector<LoadPair>& loads,
                              const std::vector<Action>& actions, double fraction = 0.9);

}  // namespace meshrl
