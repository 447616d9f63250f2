#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "meshrl/forest.hpp"
#include "meshrl/trace.hpp"
#include "meshrl/types.hpp"

namespace meshrl {

struct SurrogateOptions {
  std::size_t num_trees = 100;
  std::size_t max_depth = 20;
  std::size_t min_leaf = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  ForestOptions forest_options() const {
    return {num_trees, max_depth, min_leaf, 0, seed, threads};
  }
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Learned delay surrogate f: (l1, l2, p11, p21, b1, b2) -> (d1, d2).
class SystemModel {
 public:
  static constexpr std::size_t kFeatures = 6;
  static constexpr std::size_t kTargets = 2;

  SystemModel() = default;
  SystemModel(RegressionForest forest, std::array<Range, kFeatures> feature_ranges,
              std::array<Range, kTargets> target_ranges, Delays target_mean);

  Delays predict(double l1, double l2, double p11, double p21, double b1, double b2) const;
  Delays predict(LoadPair loads, const Action& a) const {
    return predict(loads.l1, loads.l2, a.p11, a.p21, a.b1, a.b2);
  }

  const RegressionForest& forest() const noexcept { return forest_; }
  const std::array<Range, kFeatures>& feature_ranges() const noexcept { return feature_ranges_; }
  const std::array<Range, kTargets>& target_ranges() const noexcept { return target_ranges_; }
  /// Mean training target; the naive predictor.
  Delays target_mean() const noexcept { return target_mean_; }

  /// Free-form tag stored alongside the model (e.g. a config hash).
  std::string tag;

  void write(std::ostream& out) const;
  static SystemModel read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static SystemModel load(const std::filesystem::path& path);

 private:
  RegressionForest forest_;
  std::array<Range, kFeatures> feature_ranges_{};
  std::array<Range, kTargets> target_ranges_{};
  Delays target_mean_;
};

inline constexpr std::size_t kMinFitRecords = 100;

/// Fits the surrogate on every record of `training`.
SystemModel fit_system_model(const Trace& training, const SurrogateOptions& options);

/// Feature vector (l1, l2, p11, p21, b1, b2) of a record.
std::array<double, SystemModel::kFeatures> features_of(const EpisodeRecord& rec);
Dataset to_dataset(const Trace& trace);

struct ModelAccuracy {
  double nmae_d1 = 0.0;
  double nmae_d2 = 0.0;
  double r2_d1 = 0.0;
  double r2_d2 = 0.0;
  double naive_nmae_d1 = 0.0;
  double naive_nmae_d2 = 0.0;
  std::size_t samples = 0;
};

/// NMAE = mean|yhat - y| / mean(y), R^2 = 1 - SSE/SST; the naive predictor
/// answers `naive` everywhere.
ModelAccuracy evaluate_predictions(std::span<const Delays> predicted,
                                   std::span<const Delays> truth, Delays naive);

/// Accuracy of the model on held-out records against the naive mean.
ModelAccuracy evaluate_model(const SystemModel& model, const Trace& test);

}  // namespace meshrl
