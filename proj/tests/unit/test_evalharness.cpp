#include <stdexcept>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "meshrl/evalharness.hpp"
#include "meshrl/sysmodel.hpp"

using namespace meshrl;

namespace {

const SystemModel& small_model() {
  static const SystemModel model = [] {
    SurrogateOptions o;
    o.num_trees = 10;
    o.seed = 1;
    return fit_system_model(collect_trace_random(GroundTruthParams{}, 3000, 2), o);
  }();
  return model;
}

}  // namespace

TEST_SUITE("evalharness") {

TEST_CASE("normalized reward examples") {
  CHECK(normalized_reward(1.0, 1.0).value == 1.0);
  CHECK_FALSE(normalized_reward(1.0, 1.0).flagged);
  const double anr = (normalized_reward(0.5, 1.0).value + normalized_reward(1.0, 1.0).value +
                      normalized_reward(1.0, 1.0).value + normalized_reward(1.0, 1.0).value) /
                     4.0;
  CHECK(anr == 0.875);
  const auto over = normalized_reward(1.1, 1.0);
  CHECK(over.value == doctest::Approx(1.1));
  CHECK(over.flagged);
  const auto zero = normalized_reward(0.0, 0.0);
  CHECK(zero.value == 1.0);
  CHECK_FALSE(zero.flagged);
  CHECK(normalized_reward(0.3, 0.0).flagged);
  CHECK_THROWS_AS(normalized_reward(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("environment and reference names") {
  CHECK(environment_from_string("simulation") == EnvironmentKind::Simulation);
  CHECK(environment_from_string(to_string(EnvironmentKind::GroundTruth)) ==
        EnvironmentKind::GroundTruth);
  CHECK(reference_from_string("surrogate") == ReferenceKind::Surrogate);
  CHECK_THROWS(environment_from_string("lab"));
  CHECK(default_reference(EnvironmentKind::Simulation) == ReferenceKind::Surrogate);
  CHECK(default_reference(EnvironmentKind::GroundTruth) == ReferenceKind::GroundTruth);
}

TEST_CASE("the surrogate oracle scores exactly 1 in simulation") {
  const ActionGrid grid(6);
  Evaluator ev(small_model(), GroundTruthParams{}, grid);
  for (auto kind : {ObjectiveKind::MO1, ObjectiveKind::MO2, ObjectiveKind::MO3}) {
    const auto mo = ManagementObjective::defaults(kind);
    OraclePolicy oracle(surrogate_delays(small_model()), grid, mo);
    const auto rep = ev.run_scenario(oracle, EnvironmentKind::Simulation, mo,
                                     LoadPattern::random(5), 60);
    CHECK(rep.anr == 1.0);
    CHECK(rep.flagged_count() == 0);
    CHECK(rep.scenario == scenario_id(kind));
  }
}

TEST_CASE("the ground-truth oracle scores 1 on a noiseless ground truth") {
  const ActionGrid grid(6);
  GroundTruthParams gt;
  gt.noise_rel = 0.0;
  Evaluator ev(small_model(), gt, grid);
  const auto mo = ManagementObjective::defaults(ObjectiveKind::MO2);
  OraclePolicy oracle(ground_truth_delays(gt), grid, mo);
  const auto rep = ev.run_scenario(oracle, EnvironmentKind::GroundTruth, mo,
                                   LoadPattern::sinusoidal(), 30);
  CHECK(rep.anr == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ANR is the mean of the per-step series and NR stays below 1 on ground truth") {
  const ActionGrid grid(6);
  Evaluator ev(small_model(), GroundTruthParams{}, grid);
  const auto mo = ManagementObjective::defaults(ObjectiveKind::MO1);
  RandomPolicy random(grid.size(), 4);
  for (auto env : {EnvironmentKind::Simulation, EnvironmentKind::GroundTruth}) {
    const auto rep = ev.run_scenario(random, env, mo, LoadPattern::random(7), 50);
    REQUIRE(rep.nr_series.size() == 50);
    REQUIRE(rep.records.size() == 50);
    const double mean =
        std::accumulate(rep.nr_series.begin(), rep.nr_series.end(), 0.0) / 50.0;
    CHECK(rep.anr == doctest::Approx(mean).epsilon(1e-12));
    if (env == EnvironmentKind::GroundTruth) {
      for (double nr : rep.nr_series) CHECK(nr <= 1.0 + 1e-9);
    }
    for (double nr : rep.nr_series) CHECK(nr >= 0.0);
  }
}

TEST_CASE("reports are deterministic") {
  const ActionGrid grid(6);
  Evaluator ev(small_model(), GroundTruthParams{}, grid);
  const auto mo = ManagementObjective::defaults(ObjectiveKind::MO3);
  const auto a = ev.random_baseline(EnvironmentKind::GroundTruth, mo, LoadPattern::random(1), 40, 9);
  const auto b = ev.random_baseline(EnvironmentKind::GroundTruth, mo, LoadPattern::random(1), 40, 9);
  CHECK(a.nr_series == b.nr_series);
  CHECK(a.action_indices == b.action_indices);
  CHECK(a.anr >= 0.0);
  CHECK(a.anr <= 1.0);
}

TEST_CASE("random baselines with different seeds agree within 0.05") {
  const ActionGrid grid(6);
  Evaluator ev(small_model(), GroundTruthParams{}, grid);
  const auto mo = ManagementObjective::defaults(ObjectiveKind::MO1);
  const auto pattern = LoadPattern::random(3);
  const auto a = ev.random_baseline(EnvironmentKind::Simulation, mo, pattern, 2000, 1);
  const auto b = ev.random_baseline(EnvironmentKind::Simulation, mo, pattern, 2000, 2);
  CHECK(a.action_indices != b.action_indices);
  CHECK(std::abs(a.anr - b.anr) <= 0.05);
}

TEST_CASE("identical policies give identical contrasts") {
  const ActionGrid grid(6);
  Evaluator ev(small_model(), GroundTruthParams{}, grid);
  const auto mo = ManagementObjective::defaults(ObjectiveKind::MO1);
  OraclePolicy p1(surrogate_delays(small_model()), grid, mo);
  OraclePolicy p2(surrogate_delays(small_model()), grid, mo);
  const auto c = objective_contrast(p1, p2, ev, LoadPattern::sinusoidal(), 100);
  REQUIRE(c.loads.size() == 100);
  CHECK(c.first == c.second);
  const auto s1 = peak_blocking(c.loads, c.first);
  const auto s2 = peak_blocking(c.loads, c.second);
  CHECK(s1.b1 == s2.b1);
  CHECK(s1.b2 == s2.b2);
  CHECK(s1.steps > 0);
}

TEST_CASE("peak blocking averages over high-load steps only") {
  const std::vector<LoadPair> loads{{5, 5}, {20, 20}, {19, 20}, {10, 5}};
  const std::vector<Action> acts{{0, 0, 1, 1}, {0, 0, 0.2, 0.4}, {0, 0, 0.4, 0.6}, {0, 0, 1, 1}};
  const auto s = peak_blocking(loads, acts, 0.9);
  CHECK(s.steps == 2);
  CHECK(s.b1 == doctest::Approx(0.3));
  CHECK(s.b2 == doctest::Approx(0.5));
  CHECK_THROWS(peak_blocking(loads, {acts[0]}));
  CHECK(peak_blocking({}, {}).steps == 0);
}

}
