#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meshrl/loadgen.hpp"
#include "meshrl/simulator.hpp"
#include "meshrl/types.hpp"

namespace meshrl {

/// Scale constants mapping a MeshState to unit-range inputs.
struct Normalizer {
  double load_scale = 20.0;
  double delay_scale = 2.0;
};

using Observation = std::array<double, 4>;

/// (d1, d2, l1, l2) divided by the normalizer scales.
Observation observe(const MeshState& state, const Normalizer& normalizer);

enum class HeadLayout {
  Flat,      // one categorical over the whole grid
  Factored,  // one categorical per action dimension
};

const char* to_string(HeadLayout layout);
HeadLayout head_layout_from_string(const std::string& name);

enum class ActMode { Sample, Greedy };

/// Actor-critic MLP: 4 -> hidden -> hidden (tanh) -> categorical head(s),
/// and a separate 4 -> hidden -> hidden (tanh) -> 1 value network.
/// All parameters live in one flat vector.
class PolicyNet {
 public:
  PolicyNet() = default;
  PolicyNet(int grid_levels, HeadLayout layout, std::size_t hidden, std::uint64_t seed);

  int grid_levels() const noexcept { return levels_; }
  HeadLayout layout() const noexcept { return layout_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  const std::vector<std::size_t>& head_sizes() const noexcept { return heads_; }
  std::size_t num_logits() const noexcept { return num_logits_; }

  Eigen::VectorXd& parameters() noexcept { return params_; }
  const Eigen::VectorXd& parameters() const noexcept { return params_; }

  /// Raw head outputs for one observation (concatenated heads).
  Eigen::VectorXd logits(const Observation& obs) const;
  double value(const Observation& obs) const;
  /// Probability of every grid action (sums to 1).
  std::vector<double> action_probabilities(const Observation& obs) const;
  double log_prob(const Observation& obs, ActionIndex action) const;
  /// Argmax action; ties go to the lowest index.
  ActionIndex greedy(const Observation& obs) const;
  ActionIndex sample(const Observation& obs, std::mt19937_64& rng) const;

  /// Per-head category of a grid action.
  std::vector<std::size_t> head_choices(ActionIndex action) const;

  // Batched passes used by the trainer. Columns are samples.
  struct Cache {
    Eigen::MatrixXd x, h1, h2, logits, g1, g2;
    Eigen::RowVectorXd values;
  };
  void forward(const Eigen::MatrixXd& x, Cache& cache) const;
  /// Accumulates dLoss/dparams into grad given dLoss/dlogits and dLoss/dvalues.
  void backward(const Cache& cache, const Eigen::MatrixXd& d_logits,
                const Eigen::RowVectorXd& d_values, Eigen::VectorXd& grad) const;

  /// Value targets are rewards divided by this scale.
  double reward_scale = 1.0;
  Normalizer normalizer;
  /// Free-form identifier stored in the checkpoint (e.g. a config hash).
  std::string tag;
  /// Training configuration as a JSON object, stored verbatim.
  std::string config_json;

  /// Versioned JSON checkpoint (weights, architecture, normalizer).
  std::string serialize() const;
  static PolicyNet deserialize(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static PolicyNet load(const std::filesystem::path& path);

 private:
  struct Layer {
    std::size_t w = 0, b = 0, rows = 0, cols = 0;
  };
  void layout_parameters();
  Eigen::Map<const Eigen::MatrixXd> weight(const Layer& l) const;
  Eigen::Map<const Eigen::VectorXd> bias(const Layer& l) const;

  int levels_ = 0;
  HeadLayout layout_ = HeadLayout::Flat;
  std::size_t hidden_ = 0;
  std::size_t num_actions_ = 0;
  std::size_t num_logits_ = 0;
  std::vector<std::size_t> heads_;
  std::array<Layer, 3> pi_{};
  std::array<Layer, 3> vf_{};
  Eigen::VectorXd params_;
};

/// Picks an action index; sample mode advances `rng`.
ActionIndex act(const PolicyNet& policy, const Observation& obs, ActMode mode,
                std::mt19937_64& rng);

struct TrainConfig {
  double learning_rate = 1e-3;
  double gamma = 0.0;
  double gae_lambda = 0.95;
  std::size_t batch_size = 64;
  std::size_t rollout_length = 1024;
  double clip_ratio = 0.2;
  std::size_t epochs_per_update = 10;
  std::size_t total_steps = 50000;
  double entropy_coeff = 0.01;
  double value_coeff = 0.5;
  double max_grad_norm = 0.5;
  double adam_epsilon = 1e-5;
  bool normalize_advantage = true;
  HeadLayout head = HeadLayout::Factored;
  std::size_t hidden = 64;
  Normalizer normalizer;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CurvePoint {
  std::size_t step = 0;
  double mean_reward = 0.0;
  double anr = 0.0;
};

using LearningCurve = std::vector<CurvePoint>;

struct TrainResult {
  PolicyNet policy;
  LearningCurve curve;
};

/// Thrown when a loss turns non-finite; what() carries the diagnostic dump.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generalized advantage estimates over one rollout. With gamma = 0 this is
/// reward - value for every step independently.
std::vector<double> compute_advantages(std::span<const double> rewards,
                                       std::span<const double> values, double last_value,
                                       double gamma, double lambda);

/// Per-sample clipped surrogate min(r A, clip(r, 1-eps, 1+eps) A).
double clipped_objective(double ratio, double advantage, double clip_ratio);

using RewardFunction = std::function<double(LoadPair, const Action&, Delays)>;

/// PPO against the simulator under `load_pattern`.
TrainResult train(Simulator& simulator, const ManagementObjective& objective,
                  const LoadPattern& load_pattern, const TrainConfig& config);

/// Variant with an arbitrary reward function. `reward_scale` normalizes
/// value targets; `curve` gets ANR = NaN because no optimum is defined.
TrainResult train_with_reward(Simulator& simulator, const RewardFunction& reward_fn,
                              double reward_scale, const LoadPattern& load_pattern,
                              const TrainConfig& config);

}  // namespace meshrl
