#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "meshrl/ground_truth.hpp"
#include "meshrl/loadgen.hpp"
#include "meshrl/types.hpp"

namespace meshrl {

enum class CollectionMode { Random, Grid };

const char* to_string(CollectionMode mode);
CollectionMode collection_mode_from_string(const std::string& name);

struct TraceMetadata {
  CollectionMode mode = CollectionMode::Random;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::size_t repetitions = 1;  // grid mode
  std::size_t cells = 0;        // grid mode: load pairs x actions per repetition
};

/// Raw observations (t, loads, action, delays, carried loads) from the
/// ground-truth environment.
struct Trace {
  std::vector<EpisodeRecord> records;
  TraceMetadata meta;

  std::size_t size() const noexcept { return records.size(); }
};

inline constexpr std::size_t kFullTraceSteps = 45343;
inline constexpr std::size_t kDefaultTraceSteps = 20000;

/// Random loads per step and one uniformly drawn grid action per step.
Trace collect_trace_random(const GroundTruthParams& env, std::size_t steps, std::uint64_t seed,
                           const ActionGrid& grid = ActionGrid(6),
                           const std::vector<double>& load_levels = {5, 10, 15, 20});

/// Full factorial sweep over load_levels^2 x grid, `repetitions` samples per
/// cell. Rows are ordered repetition-major.
Trace collect_trace_grid(const GroundTruthParams& env, std::size_t repetitions,
                         std::uint64_t seed, const ActionGrid& grid = ActionGrid(6),
                         const std::vector<double>& load_levels = {5, 10, 15, 20});

/// Held-out split: even/odd step index for random traces, even/odd
/// repetition for grid traces. Returns (train, test).
std::pair<Trace, Trace> split_train_test(const Trace& trace);

}  // namespace meshrl
