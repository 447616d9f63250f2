#include "meshrl/evalharness.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "meshrl/rewards.hpp"
#include "meshrl/rng.hpp"

namespace meshrl {

const char* to_string(EnvironmentKind kind) {
  return kind == EnvironmentKind::Simulation ? "simulation" : "ground-truth";
}

const char* to_string(ReferenceKind kind) {
  return kind == ReferenceKind::Surrogate ? "surrogate" : "ground-truth";
}

EnvironmentKind environment_from_string(const std::string& name) {
  if (name == "simulation") return EnvironmentKind::Simulation;
  if (name == "ground-truth") return EnvironmentKind::GroundTruth;
  throw std::invalid_argument("unknown environment '" + name + "'");
}

ReferenceKind reference_from_string(const std::string& name) {
  if (name == "surrogate") return ReferenceKind::Surrogate;
  if (name == "ground-truth") return ReferenceKind::GroundTruth;
  throw std::invalid_argument("unknown reference '" + name + "'");
}

ReferenceKind default_reference(EnvironmentKind env) {
  return env == EnvironmentKind::Simulation ? ReferenceKind::Surrogate
                                            : ReferenceKind::GroundTruth;
}

NormalizedReward normalized_reward(double obtained, double optimal) {
  if (optimal < 0.0) throw std::invalid_argument("optimal reward must be >= 0");
  if (optimal == 0.0) return {1.0, obtained > 0.0};
  const double nr = obtained / optimal;
  return {nr, nr > 1.0 + 1e-9};
}

ActionIndex NetPolicy::select(const MeshState& state, std::size_t) {
  return act(*net_, observe(state, net_->normalizer), mode_, rng_);
}

ActionIndex OraclePolicy::select(const MeshState& state, std::size_t) {
  return cache_.optimal_for(objective_, {state.l1, state.l2}).best_index;
}

ActionIndex RandomPolicy::select(const MeshState&, std::size_t step) {
  return counter_index(seed_, derive_seed(seed_, "random-policy"), step, num_actions_);
}

std::size_t EvaluationReport::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

Evaluator::Evaluator(const SystemModel& model, GroundTruthParams ground_truth,
                     const ActionGrid& grid)
    : model_(&model), ground_truth_(ground_truth), grid_(&grid), simulator_(model, grid) {
  ground_truth_.validate();
}

EvaluationReport Evaluator::run_scenario(Policy& policy, EnvironmentKind env,
                                         const ManagementObjective& objective,
                                         const LoadPattern& pattern, std::size_t steps,
                                         ReferenceKind reference, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("evaluation needs at least one step");
  objective.validate();
  pattern.validate();

  GroundTruthParams gt = ground_truth_;
  gt.seed = mix_seed(ground_truth_.seed, derive_seed(seed, "eval-noise"), 0);

  EvaluationReport report;
  report.scenario = scenario_id(objective.kind);
  report.environment = env;
  report.load_pattern = pattern.kind;
  report.reference = reference;
  report.steps = steps;
  report.nr_series.reserve(steps);
  report.records.reserve(steps);

  MeshState state;
  for (std::size_t t = 0; t < steps; ++t) {
    const LoadPair loads = offered_loads(pattern, t);
    state.l1 = loads.l1;
    state.l2 = loads.l2;
    const ActionIndex ai = policy.select(state, t);
    const Action& a = grid_->at(ai);

    Delays d;
    if (env == EnvironmentKind::Simulation) {
      d = simulator_.step(loads, ai);
    } else {
      d = step(gt, loads.l1, loads.l2, a, t).delays();
    }
    const double r = reward(objective, loads, a, d);

    double best = 0.0;
    if (reference == ReferenceKind::Surrogate) {
      best = simulator_.optimal(objective, loads).best_reward;
    } else {
      // Same noise realization for every candidate action (common random
      // numbers), so the played action can never beat the reference.
      for (const Action& cand : *grid_)
        best = std::max(best, reward(objective, loads, cand,
                                     step(gt, loads.l1, loads.l2, cand, t).delays()));
    }
    const NormalizedReward nr = normalized_reward(r, best);

    EpisodeRecord rec;
    rec.t = t;
    rec.l1 = loads.l1;
    rec.l2 = loads.l2;
    rec.action = a;
    rec.d1 = d.d1;
    rec.d2 = d.d2;
    rec.lc1 = carried_load(loads.l1, a.b1);
    rec.lc2 = carried_load(loads.l2, a.b2);
    rec.reward = r;
    rec.optimal_reward = best;
    report.records.push_back(rec);
    report.action_indices.push_back(ai);
    report.nr_series.push_back(nr.value);
    report.flagged.push_back(nr.flagged);

    state.d1 = d.d1;
    state.d2 = d.d2;
  }
  report.anr = std::accumulate(report.nr_series.begin(), report.nr_series.end(), 0.0) /
               static_cast<double>(steps);
  return report;
}

EvaluationReport Evaluator::random_baseline(EnvironmentKind env,
                                            const ManagementObjective& objective,
                                            const LoadPattern& pattern, std::size_t steps,
                                            std::uint64_t seed) {
  RandomPolicy policy(grid_->size(), seed);
  return run_scenario(policy, env, objective, pattern, steps, default_reference(env), seed);
}

ContrastReport objective_contrast(Policy& first, Policy& second, Evaluator& evaluator,
                                  const LoadPattern& pattern, std::size_t steps,
                                  EnvironmentKind env) {
  // The objective only shapes rewards, which the contrast does not use.
  const auto mo = ManagementObjective::defaults(ObjectiveKind::MO1);
  const auto ref = default_reference(env);
  const auto a = evaluator.run_scenario(first, env, mo, pattern, steps, ref);
  const auto b = evaluator.run_scenario(second, env, mo, pattern, steps, ref);
  ContrastReport out;
  for (std::size_t t = 0; t < steps; ++t) {
    out.loads.push_back({a.records[t].l1, a.records[t].l2});
    out.first.push_back(a.records[t].action);
    out.second.push_back(b.records[t].action);
  }
  return out;
}

BlockingSummary peak_blocking(const std::vector<LoadPair>& loads,
                              const std::vector<Action>& actions, double fraction) {
  if (loads.size() != actions.size()) throw std::invalid_argument("series length mismatch");
  BlockingSummary s;
  if (loads.empty()) return s;
  double peak = 0.0;
  for (const auto& l : loads) peak = std::max(peak, l.l1 + l.l2);
  for (std::size_t t = 0; t < loads.size(); ++t) {
    if (loads[t].l1 + loads[t].l2 < fraction * peak) continue;
    s.b1 += actions[t].b1;
    s.b2 += actions[t].b2;
    ++s.steps;
  }
  if (s.steps > 0) {
    s.b1 /= static_cast<double>(s.steps);
    s.b2 /= static_cast<double>(s.steps);
  }
  return s;
}

}  // namespace meshrl
