#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshrl/agent.hpp"
#include "meshrl/ground_truth.hpp"
#include "meshrl/loadgen.hpp"
#include "meshrl/sysmodel.hpp"
#include "meshrl/trace.hpp"
#include "meshrl/types.hpp"

namespace meshrl {

/// Invalid configuration; `field` is the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct CollectionSpec {
  CollectionMode mode = CollectionMode::Random;
  std::size_t steps = kDefaultTraceSteps;
  std::size_t repetitions = 2;
  std::vector<double> load_levels{5.0, 10.0, 15.0, 20.0};
};

/// Floors checked after each stage; violations warn, and fail under --strict.
struct AcceptanceFloors {
  double nmae_ratio = 1.0 / 3.0;  // model NMAE / naive NMAE, per target
  double r2 = 0.8;
  double trained_anr = 0.75;
  double baseline_gap = 0.15;
};

struct EvaluationSpec {
  std::size_t random_steps = 150;
  std::size_t sinusoidal_steps = 400;
  bool greedy = true;
  bool baselines = true;
  bool contrast = true;
  double peak_fraction = 0.9;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  GroundTruthParams ground_truth;
  int grid_levels = 6;
  CollectionSpec collection;
  SurrogateOptions surrogate;
  std::vector<ManagementObjective> objectives{ManagementObjective::defaults(ObjectiveKind::MO1)};
  TrainConfig training;
  LoadPattern sinusoid = LoadPattern::sinusoidal();
  EvaluationSpec evaluation;
  AcceptanceFloors floors;
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;

  /// Seeds of the individual stages, derived from `seed`.
  std::uint64_t collection_seed() const;
  std::uint64_t noise_seed() const;
  std::uint64_t surrogate_seed() const;
  std::uint64_t training_seed(ObjectiveKind kind) const;
  std::uint64_t training_load_seed() const;
  std::uint64_t evaluation_seed() const;
  std::uint64_t evaluation_load_seed() const;

  /// Ground truth as used by every stage (noise seed filled in).
  GroundTruthParams environment() const;
  /// Training config for one objective (seed filled in, delay scale = max delay).
  TrainConfig training_for(ObjectiveKind kind) const;
  const ManagementObjective* objective(ObjectiveKind kind) const;
};

/// Parses a JSON document; unknown keys and out-of-range values throw ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (every field, sorted keys).
std::string dump_config(const ScenarioConfig& config);

/// Hex digests identifying the inputs of each pipeline stage; a stage's hash
/// covers its own settings and those of every upstream stage.
struct StageHashes {
  std::string collect;
  std::string fit;
  std::vector<std::string> train;  // parallel to ScenarioConfig::objectives
  std::string evaluate;
};

StageHashes stage_hashes(const ScenarioConfig& config);

/// JSON object text of the training settings for one objective.
std::string training_json(const ScenarioConfig& config, ObjectiveKind kind);

}  // namespace meshrl
