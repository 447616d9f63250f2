#include "meshrl/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "meshrl/rng.hpp"

namespace meshrl {

void Dataset::add_row(std::span<const double> x, std::span<const double> y) {
  if (x.size() != num_features || y.size() != num_targets)
    throw std::invalid_argument("row width does not match dataset shape");
  features.insert(features.end(), x.begin(), x.end());
  targets.insert(targets.end(), y.begin(), y.end());
}

void ForestOptions::validate() const {
  if (num_trees < 1) throw std::invalid_argument("forest needs at least one tree");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
}

namespace {

struct SplitCandidate {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestOptions& options, std::uint64_t seed,
              std::vector<RegressionTree::Node>& nodes, std::vector<double>& values)
      : data_(data),
        options_(options),
        rng_(seed),
        nodes_(nodes),
        values_(values),
        mtry_(options.max_features != 0
                  ? std::min(options.max_features, data.num_features)
                  : static_cast<std::size_t>(
                        std::ceil(std::sqrt(static_cast<double>(data.num_features))))),
        feature_order_(data.num_features) {
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
  }

  std::int32_t build(std::span<std::uint32_t> rows, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t n = rows.size();

    SplitCandidate best;
    if (depth < options_.max_depth && n >= 2 * options_.min_leaf && !constant_targets(rows))
      best = find_split(rows);

    if (best.feature < 0) {
      make_leaf(id, rows);
      return id;
    }

    auto mid = std::partition(rows.begin(), rows.end(), [&](std::uint32_t r) {
      return feature(r, static_cast<std::size_t>(best.feature)) < best.threshold;
    });
    const auto n_left = static_cast<std::size_t>(mid - rows.begin());
    const std::int32_t left = build(rows.first(n_left), depth + 1);
    const std::int32_t right = build(rows.subspan(n_left), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

 private:
  double feature(std::uint32_t r, std::size_t f) const {
    return data_.features[r * data_.num_features + f];
  }
  double target(std::uint32_t r, std::size_t t) const {
    return data_.targets[r * data_.num_targets + t];
  }

  bool constant_targets(std::span<const std::uint32_t> rows) const {
    for (std::size_t t = 0; t < data_.num_targets; ++t) {
      const double first = target(rows[0], t);
      for (auto r : rows)
        if (target(r, t) != first) return false;
    }
    return true;
  }

  void make_leaf(std::int32_t id, std::span<const std::uint32_t> rows) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = -1;
    node.value_offset = static_cast<std::uint32_t>(values_.size());
    for (std::size_t t = 0; t < data_.num_targets; ++t) {
      double sum = 0.0;
      for (auto r : rows) sum += target(r, t);
      values_.push_back(sum / static_cast<double>(rows.size()));
    }
  }

  // Best variance-reducing split over mtry random features. If none of the
  // drawn features can split, the remaining ones are tried in turn.
  SplitCandidate find_split(std::span<const std::uint32_t> rows) {
    const std::size_t n = rows.size();
    const std::size_t k = data_.num_targets;
    // Partial Fisher-Yates over the feature list.
    for (std::size_t i = 0; i + 1 < feature_order_.size(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, feature_order_.size() - 1);
      std::swap(feature_order_[i], feature_order_[pick(rng_)]);
    }

    std::vector<double> total(k, 0.0);
    for (auto r : rows)
      for (std::size_t t = 0; t < k; ++t) total[t] += target(r, t);

    sorted_.resize(n);
    prefix_.assign(k, 0.0);
    SplitCandidate best;
    for (std::size_t fi = 0; fi < feature_order_.size(); ++fi) {
      if (fi >= mtry_ && best.feature >= 0) break;
      const std::size_t f = feature_order_[fi];
      for (std::size_t i = 0; i < n; ++i) sorted_[i] = {feature(rows[i], f), rows[i]};
      std::sort(sorted_.begin(), sorted_.end());
      if (sorted_.front().first == sorted_.back().first) continue;

      std::fill(prefix_.begin(), prefix_.end(), 0.0);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t t = 0; t < k; ++t) prefix_[t] += target(sorted_[i].second, t);
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < options_.min_leaf) continue;
        if (n_right < options_.min_leaf) break;
        if (sorted_[i].first == sorted_[i + 1].first) continue;
        double score = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          const double right = total[t] - prefix_[t];
          score += prefix_[t] * prefix_[t] / static_cast<double>(n_left) +
                   right * right / static_cast<double>(n_right);
        }
        if (score > best.score) {
          best.score = score;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = 0.5 * (sorted_[i].first + sorted_[i + 1].first);
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const ForestOptions& options_;
  std::mt19937_64 rng_;
  std::vector<RegressionTree::Node>& nodes_;
  std::vector<double>& values_;
  std::size_t mtry_;
  std::vector<std::size_t> feature_order_;
  std::vector<std::pair<double, std::uint32_t>> sorted_;
  std::vector<double> prefix_;
};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated forest stream");
  return v;
}

constexpr char kForestMagic[8] = {'M', 'R', 'F', 'O', 'R', 'E', 'S', 'T'};
constexpr std::uint32_t kForestVersion = 1;

}  // namespace

RegressionTree RegressionTree::grow(const Dataset& data, std::vector<std::uint32_t> sample,
                                    const ForestOptions& options, std::uint64_t seed) {
  if (sample.empty()) throw std::invalid_argument("cannot grow a tree on zero rows");
  RegressionTree tree;
  TreeBuilder builder(data, options, seed, tree.nodes_, tree.values_);
  builder.build(sample, 0);
  return tree;
}

const double* RegressionTree::leaf_values(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold
                                     ? node.left
                                     : node.right);
  }
  return values_.data() + nodes_[i].value_offset;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return deepest;
}

void RegressionTree::write(std::ostream& out) const {
  write_pod(out, static_cast<std::uint64_t>(nodes_.size()));
  for (const auto& n : nodes_) {
    write_pod(out, n.feature);
    write_pod(out, n.left);
    write_pod(out, n.right);
    write_pod(out, n.value_offset);
    write_pod(out, n.threshold);
  }
  write_pod(out, static_cast<std::uint64_t>(values_.size()));
  out.write(reinterpret_cast<const char*>(values_.data()),
            static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

RegressionTree RegressionTree::read(std::istream& in) {
  RegressionTree tree;
  const auto n_nodes = read_pod<std::uint64_t>(in);
  tree.nodes_.resize(n_nodes);
  for (auto& n : tree.nodes_) {
    n.feature = read_pod<std::int32_t>(in);
    n.left = read_pod<std::int32_t>(in);
    n.right = read_pod<std::int32_t>(in);
    n.value_offset = read_pod<std::uint32_t>(in);
    n.threshold = read_pod<double>(in);
  }
  const auto n_values = read_pod<std::uint64_t>(in);
  tree.values_.resize(n_values);
  in.read(reinterpret_cast<char*>(tree.values_.data()),
          static_cast<std::streamsize>(n_values * sizeof(double)));
  if (!in) throw std::runtime_error("truncated forest stream");
  if (n_nodes == 0) throw std::runtime_error("empty tree in forest stream");
  auto valid_child = [n_nodes](std::int32_t c) {
    return c > 0 && static_cast<std::uint64_t>(c) < n_nodes;
  };
  for (const auto& n : tree.nodes_) {
    const bool ok = n.feature < 0 ? n.value_offset < n_values
                                  : valid_child(n.left) && valid_child(n.right);
    if (!ok) throw std::runtime_error("corrupt tree structure");
  }
  return tree;
}

RegressionForest RegressionForest::fit(const Dataset& data, const ForestOptions& options) {
  options.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw std::invalid_argument("cannot fit a forest on an empty dataset");
  if (data.targets.size() != n * data.num_targets)
    throw std::invalid_argument("target matrix does not match feature rows");

  RegressionForest forest;
  forest.num_features_ = data.num_features;
  forest.num_targets_ = data.num_targets;
  forest.options_ = options;
  forest.trees_.resize(options.num_trees);

  auto grow_one = [&](std::size_t b) {
    const std::uint64_t tree_seed = mix_seed(options.seed, 0x7265657274ULL, b);
    std::mt19937_64 rng(tree_seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    std::vector<std::uint32_t> sample(n);
    for (auto& s : sample) s = pick(rng);
    forest.trees_[b] = RegressionTree::grow(data, std::move(sample), options, rng());
  };

  std::size_t workers = options.threads != 0 ? options.threads
                                             : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, options.num_trees);
  if (workers <= 1) {
    for (std::size_t b = 0; b < options.num_trees; ++b) grow_one(b);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < options.num_trees; b += workers) grow_one(b);
      });
  }
  return forest;
}

void RegressionForest::predict(std::span<const double> x, std::span<double> out) const {
  if (x.size() != num_features_ || out.size() != num_targets_)
    throw std::invalid_argument("predict: input/output width mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& tree : trees_) {
    const double* v = tree.leaf_values(x);
    for (std::size_t t = 0; t < num_targets_; ++t) out[t] += v[t];
  }
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (auto& o : out) o *= inv;
}

std::vector<double> RegressionForest::predict(std::span<const double> x) const {
  std::vector<double> out(num_targets_);
  predict(x, out);
  return out;
}

void RegressionForest::write(std::ostream& out) const {
  out.write(kForestMagic, sizeof(kForestMagic));
  write_pod(out, kForestVersion);
  write_pod(out, static_cast<std::uint64_t>(num_features_));
  write_pod(out, static_cast<std::uint64_t>(num_targets_));
  write_pod(out, static_cast<std::uint64_t>(options_.num_trees));
  write_pod(out, static_cast<std::uint64_t>(options_.max_depth));
  write_pod(out, static_cast<std::uint64_t>(options_.min_leaf));
  write_pod(out, static_cast<std::uint64_t>(options_.max_features));
  write_pod(out, options_.seed);
  write_pod(out, static_cast<std::uint64_t>(trees_.size()));
  for (const auto& t : trees_) t.write(out);
}

RegressionForest RegressionForest::read(std::istream& in) {
  char magic[sizeof(kForestMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kForestMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a forest stream");
  if (read_pod<std::uint32_t>(in) != kForestVersion)
    throw std::runtime_error("unsupported forest format version");
  RegressionForest f;
  f.num_features_ = read_pod<std::uint64_t>(in);
  f.num_targets_ = read_pod<std::uint64_t>(in);
  f.options_.num_trees = read_pod<std::uint64_t>(in);
  f.options_.max_depth = read_pod<std::uint64_t>(in);
  f.options_.min_leaf = read_pod<std::uint64_t>(in);
  f.options_.max_features = read_pod<std::uint64_t>(in);
  f.options_.seed = read_pod<std::uint64_t>(in);
  const auto n_trees = read_pod<std::uint64_t>(in);
  if (n_trees == 0) throw std::runtime_error("forest stream holds no trees");
  f.trees_.reserve(n_trees);
  for (std::uint64_t b = 0; b < n_trees; ++b) f.trees_.push_back(RegressionTree::read(in));
  return f;
}

}  // namespace meshrl
