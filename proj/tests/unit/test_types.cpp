#include <stdexcept>
#include <cmath>
#include <set>

#include "doctest.h"
#include "meshrl/types.hpp"

using namespace meshrl;

TEST_SUITE("types") {

TEST_CASE("six-level grid matches the listed action set") {
  const ActionGrid g = build_action_grid(6);
  CHECK(g.size() == 1296);
  CHECK(g[0] == Action{0, 0, 0, 0});
  CHECK(g[1].b2 == doctest::Approx(0.2));
  CHECK(g[1].p11 == 0.0);
  CHECK(g[1].p21 == 0.0);
  CHECK(g[1].b1 == 0.0);
  CHECK(g[g.size() - 1] == Action{1, 1, 1, 1});
}

TEST_CASE("two-level grid uses only 0 and 1") {
  const ActionGrid g(2);
  CHECK(g.size() == 16);
  for (const Action& a : g)
    for (double v : {a.p11, a.p21, a.b1, a.b2}) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("grid cardinality and values for levels 2..8") {
  for (int n = 2; n <= 8; ++n) {
    const ActionGrid g(n);
    CHECK(g.size() == static_cast<std::size_t>(n * n * n * n));
    std::set<std::array<double, 4>> distinct;
    for (const Action& a : g) {
      for (double v : {a.p11, a.p21, a.b1, a.b2}) {
        const double k = v * (n - 1);
        CHECK(std::abs(k - std::round(k)) < 1e-12);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      distinct.insert({a.p11, a.p21, a.b1, a.b2});
    }
    CHECK(distinct.size() == g.size());
  }
}

TEST_CASE("grid order is lexicographic in (p11, p21, b1, b2)") {
  const ActionGrid g(4);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const auto& a = g[i - 1];
    const auto& b = g[i];
    CHECK(std::array{a.p11, a.p21, a.b1, a.b2} < std::array{b.p11, b.p21, b.b1, b.b2});
  }
}

TEST_CASE("index_of, level_indices and nearest round-trip") {
  const ActionGrid g(6);
  for (ActionIndex i = 0; i < g.size(); i += 37) {
    CHECK(g.index_of(g.level_indices(i)) == i);
    CHECK(g.nearest(g[i]) == i);
  }
  CHECK(g.nearest(Action{0.99, 0.01, 0.41, 0.59}) == g.index_of({5, 0, 2, 3}));
}

TEST_CASE("grid with fewer than two levels is rejected") {
  CHECK_THROWS_AS(ActionGrid(1), std::invalid_argument);
  CHECK_THROWS_AS(build_action_grid(0), std::invalid_argument);
}

TEST_CASE("carried load examples") {
  CHECK(carried_load(10, 0) == 10.0);
  CHECK(carried_load(10, 1) == 0.0);
  CHECK(carried_load(20, 0.2) == doctest::Approx(16.0).epsilon(1e-12));
  CHECK_THROWS_AS(carried_load(10, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(carried_load(10, 1.5), std::invalid_argument);
}

TEST_CASE("carried load is nonincreasing in blocking and within [0, l]") {
  for (double l : {0.0, 5.0, 12.5, 20.0}) {
    double prev = carried_load(l, 0.0);
    for (int k = 0; k <= 100; ++k) {
      const double b = k / 100.0;
      const double lc = carried_load(l, b);
      CHECK(lc <= prev + 1e-15);
      CHECK(lc >= 0.0);
      CHECK(lc <= l);
      prev = lc;
    }
  }
}

TEST_CASE("implied routing weights complement stored ones") {
  const Action a{0.3, 0.8, 0.1, 0.0};
  CHECK(a.p12() == doctest::Approx(0.7));
  CHECK(a.p22() == doctest::Approx(0.2));
  CHECK(a.routing(0, 0) + a.routing(0, 1) == doctest::Approx(1.0));
  CHECK(a.routing(1, 0) + a.routing(1, 1) == doctest::Approx(1.0));
  CHECK(a.blocking(1) == 0.0);
}

TEST_CASE("action and config validation") {
  CHECK_THROWS_AS(Action({1.2, 0, 0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Action({0, 0, -0.1, 0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(Action({1, 0, 0.4, 1}).validate());
  MeshConfig mc;
  CHECK_NOTHROW(mc.validate());
  mc.time_step_seconds = 0.0;
  CHECK_THROWS(mc.validate());
  mc = MeshConfig{};
  mc.num_services = 3;
  CHECK_THROWS(mc.validate());
}

TEST_CASE("objective kinds round-trip through names") {
  for (auto k : {ObjectiveKind::MO1, ObjectiveKind::MO2, ObjectiveKind::MO3})
    CHECK(objective_kind_from_string(to_string(k)) == k);
  CHECK(scenario_id(ObjectiveKind::MO3) == 3);
  CHECK_THROWS(objective_kind_from_string("MO4"));
  auto mo = ManagementObjective::defaults(ObjectiveKind::MO2);
  CHECK(mo.utility_weights[0] == 1.0);
  CHECK(mo.utility_weights[1] == 5.0);
  mo.delay_bounds[0] = 0.0;
  CHECK_THROWS(mo.validate());
}

}
