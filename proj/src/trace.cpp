#include "meshrl/trace.hpp"

#include <stdexcept>
#include <string>

#include "meshrl/rng.hpp"

namespace meshrl {

const char* to_string(CollectionMode mode) {
  return mode == CollectionMode::Random ? "random" : "grid";
}

CollectionMode collection_mode_from_string(const std::string& name) {
  if (name == "random") return CollectionMode::Random;
  if (name == "grid") return CollectionMode::Grid;
  throw std::invalid_argument("unknown collection mode '" + name + "'");
}

namespace {

EpisodeRecord observe(const GroundTruthParams& env, std::size_t t, double l1, double l2,
                      const Action& a) {
  const StepOutcome out = step(env, l1, l2, a, t);
  EpisodeRecord rec;
  rec.t = t;
  rec.l1 = l1;
  rec.l2 = l2;
  rec.action = a;
  rec.d1 = out.d1;
  rec.d2 = out.d2;
  rec.lc1 = out.lc1;
  rec.lc2 = out.lc2;
  return rec;
}

}  // namespace

Trace collect_trace_random(const GroundTruthParams& env, std::size_t steps, std::uint64_t seed,
                           const ActionGrid& grid, const std::vector<double>& load_levels) {
  if (steps < 1) throw std::invalid_argument("trace needs at least one step");
  env.validate();
  GroundTruthParams noisy = env;
  noisy.seed = mix_seed(env.seed, derive_seed(seed, "collect-noise"), 0);
  LoadPattern loads = LoadPattern::random(derive_seed(seed, "collect-load"));
  loads.random_levels = load_levels;
  loads.validate();
  const std::uint64_t action_stream = derive_seed(seed, "collect-action");

  Trace trace;
  trace.meta = {CollectionMode::Random, seed, steps, 1, 0};
  trace.records.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const LoadPair l = offered_loads(loads, t);
    const Action& a = grid[counter_index(seed, action_stream, t, grid.size())];
    trace.records.push_back(observe(noisy, t, l.l1, l.l2, a));
  }
  return trace;
}

Trace collect_trace_grid(const GroundTruthParams& env, std::size_t repetitions,
                         std::uint64_t seed, const ActionGrid& grid,
                         const std::vector<double>& load_levels) {
  if (repetitions < 1) throw std::invalid_argument("grid sweep needs at least one repetition");
  if (load_levels.empty()) throw std::invalid_argument("grid sweep needs load levels");
  env.validate();
  GroundTruthParams noisy = env;
  noisy.seed = mix_seed(env.seed, derive_seed(seed, "collect-noise"), 0);

  const std::size_t cells = load_levels.size() * load_levels.size() * grid.size();
  Trace trace;
  trace.meta = {CollectionMode::Grid, seed, cells * repetitions, repetitions, cells};
  trace.records.reserve(cells * repetitions);
  std::size_t t = 0;
  for (std::size_t rep = 0; rep < repetitions; ++rep)
    for (double l1 : load_levels)
      for (double l2 : load_levels)
        for (const Action& a : grid) trace.records.push_back(observe(noisy, t++, l1, l2, a));
  return trace;
}

std::pair<Trace, Trace> split_train_test(const Trace& trace) {
  std::pair<Trace, Trace> out;
  out.first.meta = trace.meta;
  out.second.meta = trace.meta;
  for (const auto& rec : trace.records) {
    const std::size_t key = trace.meta.mode == CollectionMode::Grid && trace.meta.cells > 0
                                ? rec.t / trace.meta.cells
                                : rec.t;
    (key % 2 == 0 ? out.first : out.second).records.push_back(rec);
  }
  out.first.meta.steps = out.first.records.size();
  out.second.meta.steps = out.second.records.size();
  return out;
}

}  // namespace meshrl
