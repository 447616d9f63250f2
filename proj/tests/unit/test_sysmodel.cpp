#include <stdexcept>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "meshrl/csv.hpp"
#include "meshrl/sysmodel.hpp"

using namespace meshrl;

namespace {

GroundTruthParams noiseless() {
  GroundTruthParams p;
  p.noise_rel = 0.0;
  p.seed = 3;
  return p;
}

}  // namespace

TEST_SUITE("sysmodel") {

TEST_CASE("random trace sizes, grid membership and carried loads") {
  const ActionGrid grid(6);
  const Trace one = collect_trace_random(GroundTruthParams{}, 1, 5, grid);
  REQUIRE(one.size() == 1);
  CHECK(grid[grid.nearest(one.records[0].action)] == one.records[0].action);

  const Trace full = collect_trace_random(GroundTruthParams{}, kFullTraceSteps, 5, grid);
  CHECK(full.size() == 45343);
  for (std::size_t i = 0; i < full.size(); i += 101) {
    const auto& r = full.records[i];
    CHECK(r.t == i);
    CHECK(r.lc1 == doctest::Approx(r.l1 * (1 - r.action.b1)));
    CHECK(r.lc2 == doctest::Approx(r.l2 * (1 - r.action.b2)));
    CHECK(!r.reward.has_value());
    CHECK(!r.optimal_reward.has_value());
  }
}

TEST_CASE("traces are byte-identical for a fixed seed") {
  const Trace a = collect_trace_random(GroundTruthParams{}, 3000, 21);
  const Trace b = collect_trace_random(GroundTruthParams{}, 3000, 21);
  CHECK(trace_csv(a) == trace_csv(b));
  CHECK(trace_csv(a) != trace_csv(collect_trace_random(GroundTruthParams{}, 3000, 22)));
}

TEST_CASE("random traces draw actions uniformly over the grid") {
  const Trace t = collect_trace_random(GroundTruthParams{}, 64800, 2);
  const ActionGrid grid(6);
  std::vector<int> counts(grid.size());
  for (const auto& r : t.records) ++counts[grid.nearest(r.action)];
  // 50 expected per action; a chi-square with 1295 dof has sd ~ 51.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 50.0) * (c - 50.0) / 50.0;
  CHECK(chi2 < 1295 + 5 * 51);
}

TEST_CASE("grid traces cover every cell") {
  const ActionGrid grid(6);
  const Trace two = collect_trace_grid(GroundTruthParams{}, 2, 1, grid);
  CHECK(two.size() == 41472);
  const Trace once = collect_trace_grid(GroundTruthParams{}, 1, 1, grid);
  CHECK(once.size() == 20736);
  std::set<std::array<double, 6>> cells;
  for (const auto& r : once.records) {
    CHECK(grid[grid.nearest(r.action)] == r.action);
    CHECK(std::set<double>{5, 10, 15, 20}.count(r.l1) == 1);
    CHECK(std::set<double>{5, 10, 15, 20}.count(r.l2) == 1);
    cells.insert({r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2});
  }
  CHECK(cells.size() == 20736);
}

TEST_CASE("train/test split is disjoint by step parity or repetition") {
  const Trace t = collect_trace_random(GroundTruthParams{}, 1001, 4);
  const auto [train, test] = split_train_test(t);
  CHECK(train.size() == 501);
  CHECK(test.size() == 500);
  for (const auto& r : train.records) CHECK(r.t % 2 == 0);
  for (const auto& r : test.records) CHECK(r.t % 2 == 1);

  const Trace g = collect_trace_grid(GroundTruthParams{}, 2, 4, ActionGrid(2));
  const auto [gtrain, gtest] = split_train_test(g);
  CHECK(gtrain.size() == g.size() / 2);
  CHECK(gtest.size() == g.size() / 2);
}

TEST_CASE("too few records are rejected") {
  const Trace t = collect_trace_random(GroundTruthParams{}, 99, 1);
  CHECK_THROWS_AS(fit_system_model(t, SurrogateOptions{}), std::invalid_argument);
}

TEST_CASE("constant-target trace gives a constant model") {
  Trace t = collect_trace_random(GroundTruthParams{}, 300, 1);
  for (auto& r : t.records) r.d1 = r.d2 = 0.123;
  SurrogateOptions o;
  o.num_trees = 10;
  const auto m = fit_system_model(t, o);
  for (double l : {0.0, 10.0, 33.0}) {
    const auto d = m.predict(l, l, 0.3, 0.6, 0.1, 1.0);
    CHECK(d.d1 == doctest::Approx(0.123).epsilon(1e-12));
    CHECK(d.d2 == doctest::Approx(0.123).epsilon(1e-12));
  }
}

TEST_CASE("in-sample fit on a noiseless grid trace is within 10%") {
  const Trace t = collect_trace_grid(noiseless(), 2, 8);
  SurrogateOptions o;
  o.seed = 2;
  const auto m = fit_system_model(t, o);
  std::size_t within = 0;
  for (const auto& r : t.records) {
    const auto d = m.predict(r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2);
    within += std::abs(d.d1 - r.d1) <= 0.1 * r.d1 && std::abs(d.d2 - r.d2) <= 0.1 * r.d2;
  }
  MESSAGE("rows within 10%: " << within << " of " << t.size());
  CHECK(within >= 0.95 * t.size());
  const auto& r = t.records[0];
  const auto d = m.predict(r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2);
  CHECK(std::abs(d.d1 - r.d1) <= 0.1 * r.d1);
  CHECK(std::abs(d.d2 - r.d2) <= 0.1 * r.d2);
}

TEST_CASE("prediction at (10, 10, 1, 0, 0, 0) matches the closed form within 15%") {
  const Trace t = collect_trace_grid(noiseless(), 2, 8);
  SurrogateOptions o;
  o.seed = 1;
  const auto m = fit_system_model(t, o);
  const auto d = m.predict(10, 10, 1, 0, 0, 0);
  CHECK(std::abs(d.d1 - 0.035) <= 0.15 * 0.035);
  CHECK(std::abs(d.d2 - 0.065) <= 0.15 * 0.065);
  CHECK(m.predict(10, 10, 1, 0, 0, 0) == d);
}

TEST_CASE("held-out accuracy on a 20k random trace beats the naive mean") {
  const Trace t = collect_trace_random(GroundTruthParams{}, kDefaultTraceSteps, 17);
  const auto [train, test] = split_train_test(t);
  SurrogateOptions o;
  o.seed = 4;
  const auto m = fit_system_model(train, o);
  const auto acc = evaluate_model(m, test);
  CHECK(acc.samples == test.size());
  CHECK(acc.nmae_d1 <= acc.naive_nmae_d1 / 3);
  CHECK(acc.nmae_d2 <= acc.naive_nmae_d2 / 3);
  CHECK(acc.r2_d1 >= 0.8);
  CHECK(acc.r2_d2 >= 0.8);
  // Predictions stay in the training target range.
  for (std::size_t i = 0; i < test.size(); i += 50) {
    const auto& r = test.records[i];
    const auto d = m.predict(r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2);
    CHECK(d.d1 >= m.target_ranges()[0].lo);
    CHECK(d.d1 <= m.target_ranges()[0].hi);
    CHECK(d.d2 >= m.target_ranges()[1].lo);
    CHECK(d.d2 <= m.target_ranges()[1].hi);
  }
  // The reference testbed reached NMAE 0.07-0.15; the saturation cliff of
  // this ground truth makes that band indicative only.
  WARN(acc.nmae_d1 <= 0.15);
  WARN(acc.nmae_d2 <= 0.15);
  MESSAGE("held-out NMAE d1 " << acc.nmae_d1 << " d2 " << acc.nmae_d2 << ", naive "
                              << acc.naive_nmae_d1 << " / " << acc.naive_nmae_d2);
}

TEST_CASE("accuracy metrics on perfect and naive predictors") {
  const Trace t = collect_trace_random(GroundTruthParams{}, 500, 3);
  std::vector<Delays> truth;
  double m1 = 0, m2 = 0;
  for (const auto& r : t.records) {
    truth.push_back({r.d1, r.d2});
    m1 += r.d1;
    m2 += r.d2;
  }
  const Delays naive{m1 / truth.size(), m2 / truth.size()};
  const auto perfect = evaluate_predictions(truth, truth, naive);
  CHECK(perfect.nmae_d1 == 0.0);
  CHECK(perfect.nmae_d2 == 0.0);
  CHECK(perfect.r2_d1 == 1.0);
  CHECK(perfect.r2_d2 == 1.0);

  const std::vector<Delays> constant(truth.size(), naive);
  const auto self = evaluate_predictions(constant, truth, naive);
  CHECK(self.nmae_d1 == doctest::Approx(self.naive_nmae_d1).epsilon(1e-12));
  CHECK(self.nmae_d2 == doctest::Approx(self.naive_nmae_d2).epsilon(1e-12));
  CHECK(self.r2_d1 <= 1e-12);
  CHECK(self.r2_d2 <= 1e-12);

  CHECK_THROWS_AS(evaluate_predictions({}, {}, naive), std::invalid_argument);
  SurrogateOptions o;
  o.num_trees = 5;
  const auto model = fit_system_model(t, o);
  CHECK_THROWS_AS(evaluate_model(model, Trace{}), std::invalid_argument);
}

TEST_CASE("model files round-trip with their tag") {
  const Trace t = collect_trace_random(GroundTruthParams{}, 1000, 3);
  SurrogateOptions o;
  o.num_trees = 8;
  auto m = fit_system_model(t, o);
  m.tag = "abc123";
  const auto path = std::filesystem::temp_directory_path() / "meshrl_model_roundtrip.bin";
  m.save(path);
  const auto back = SystemModel::load(path);
  CHECK(back.tag == "abc123");
  for (std::size_t i = 0; i < t.size(); i += 13) {
    const auto& r = t.records[i];
    CHECK(back.predict(r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2) ==
          m.predict(r.l1, r.l2, r.action.p11, r.action.p21, r.action.b1, r.action.b2));
  }
  std::filesystem::remove(path);
  std::istringstream junk("not a model");
  CHECK_THROWS(SystemModel::read(junk));
}

}
