#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace meshrl {

/// Row-major design matrix with multi-output targets.
struct Dataset {
  std::size_t num_features = 0;
  std::size_t num_targets = 0;
  std::vector<double> features;  // rows * num_features
  std::vector<double> targets;   // rows * num_targets

  Dataset() = default;
  Dataset(std::size_t n_features, std::size_t n_targets)
      : num_features(n_features), num_targets(n_targets) {}

  std::size_t rows() const noexcept {
    return num_features == 0 ? 0 : features.size() / num_features;
  }
  std::span<const double> row(std::size_t r) const {
    return {features.data() + r * num_features, num_features};
  }
  std::span<const double> target(std::size_t r) const {
    return {targets.data() + r * num_targets, num_targets};
  }
  void add_row(std::span<const double> x, std::span<const double> y);
};

struct ForestOptions {
  std::size_t num_trees = 100;
  std::size_t max_depth = 20;
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // 0 selects ceil(sqrt(num_features))
  std::uint64_t seed = 0;
  std::size_t threads = 0;       // 0 selects hardware concurrency

  void validate() const;
};

/// CART regression tree with vector-valued mean leaves.
class RegressionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t value_offset = 0;  // leaves only, into values()
    double threshold = 0.0;
  };

  /// Grows a tree on the rows listed in `sample` (duplicates allowed).
  static RegressionTree grow(const Dataset& data, std::vector<std::uint32_t> sample,
                             const ForestOptions& options, std::uint64_t seed);

  /// Pointer to num_targets leaf means for input x.
  const double* leaf_values(std::span<const double> x) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t depth() const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }

  void write(std::ostream& out) const;
  static RegressionTree read(std::istream& in);

 private:
  std::vector<Node> nodes_;
  std::vector<double> values_;
};

/// Bagged ensemble of regression trees (random forest).
class RegressionForest {
 public:
  static RegressionForest fit(const Dataset& data, const ForestOptions& options);

  void predict(std::span<const double> x, std::span<double> out) const;
  std::vector<double> predict(std::span<const double> x) const;

  std::size_t num_features() const noexcept { return num_features_; }
  std::size_t num_targets() const noexcept { return num_targets_; }
  std::size_t size() const noexcept { return trees_.size(); }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const ForestOptions& options() const noexcept { return options_; }

  void write(std::ostream& out) const;
  static RegressionForest read(std::istream& in);

 private:
  std::size_t num_features_ = 0;
  std::size_t num_targets_ = 0;
  ForestOptions options_;
  std::vector<RegressionTree> trees_;
};

}  // namespace meshrl
