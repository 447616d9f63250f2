#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "meshrl/agent.hpp"
#include "meshrl/config.hpp"
#include "meshrl/csv.hpp"
#include "meshrl/sysmodel.hpp"
#include "meshrl/trace.hpp"

namespace meshrl {

struct PipelineOptions {
  bool force = false;   // rerun stages even when their outputs are current
  std::ostream* log = nullptr;
};

/// collect -> fit -> train -> evaluate over one output directory. Each stage
/// reuses its output when the file's recorded config hash matches.
class Pipeline {
 public:
  Pipeline(ScenarioConfig config, PipelineOptions options = {});

  const Trace& collect();
  const SystemModel& fit();
  /// One policy per configured objective, trained concurrently.
  const std::vector<PolicyNet>& train();
  /// Four cells per objective plus baselines and the MO1/MO2 contrast.
  const std::vector<ResultRow>& evaluate();
  /// All stages; returns the results table.
  const std::vector<ResultRow>& run();

  const ScenarioConfig& config() const noexcept { return config_; }
  const StageHashes& hashes() const noexcept { return hashes_; }
  const std::optional<ModelAccuracy>& accuracy() const noexcept { return accuracy_; }
  const std::vector<ResultRow>& baselines() const noexcept { return baselines_; }
  /// Human-readable acceptance-floor violations found so far.
  const std::vector<std::string>& violations() const noexcept { return violations_; }
  /// Stages that reused existing outputs.
  const std::vector<std::string>& skipped() const noexcept { return skipped_; }

  std::filesystem::path trace_path() const;
  std::filesystem::path model_path() const;
  std::filesystem::path accuracy_path() const;
  std::filesystem::path policy_path(ObjectiveKind kind) const;
  std::filesystem::path curve_path(ObjectiveKind kind) const;
  std::filesystem::path report_path(int scenario, const std::string& env,
                                    const std::string& pattern) const;
  std::filesystem::path results_path() const;
  std::filesystem::path baselines_path() const;
  std::filesystem::path contrast_path() const;

 private:
  void note(const std::string& message) const;
  void check_accuracy(const ModelAccuracy& acc);
  void check_results();

  ScenarioConfig config_;
  PipelineOptions options_;
  StageHashes hashes_;
  ActionGrid grid_;
  std::optional<Trace> trace_;
  std::optional<SystemModel> model_;
  std::optional<ModelAccuracy> accuracy_;
  std::vector<PolicyNet> policies_;
  std::vector<ResultRow> results_;
  std::vector<ResultRow> baselines_;
  bool evaluated_ = false;
  std::vector<std::string> violations_;
  std::vector<std::string> skipped_;
};

/// Exhaustive reward landscape at one load pair, as CSV text.
std::string sweep(const ActionGrid& grid, const DelayModel& delays,
                  const ManagementObjective& objective, LoadPair loads);

}  // namespace meshrl
