#include <stdexcept>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "meshrl/loadgen.hpp"

using namespace meshrl;

TEST_SUITE("loadgen") {

TEST_CASE("random loads come from the level set") {
  const LoadPattern p = LoadPattern::random(42);
  for (std::size_t t = 0; t < 1000; ++t)
    for (std::size_t s = 0; s < 2; ++s) {
      const double l = random_load(p, s, t);
      CHECK((l == 5.0 || l == 10.0 || l == 15.0 || l == 20.0));
    }
}

TEST_CASE("random loads are a function of (seed, service, step)") {
  const LoadPattern p = LoadPattern::random(7);
  CHECK(random_load(p, 0, 123) == random_load(p, 0, 123));
  CHECK(random_load(p, 1, 999) == random_load(LoadPattern::random(7), 1, 999));
  // Querying out of order does not disturb the stream.
  const double later = random_load(p, 0, 500);
  for (std::size_t t = 0; t < 500; ++t) (void)random_load(p, 0, t);
  CHECK(random_load(p, 0, 500) == later);
}

TEST_CASE("each level has frequency 0.25 over 1e5 draws") {
  const LoadPattern p = LoadPattern::random(2024);
  for (std::size_t s = 0; s < 2; ++s) {
    std::map<double, int> counts;
    const int n = 100000;
    for (int t = 0; t < n; ++t) ++counts[random_load(p, s, t)];
    CHECK(counts.size() == 4);
    for (const auto& [level, c] : counts) CHECK(std::abs(c / double(n) - 0.25) <= 0.01);
  }
}

TEST_CASE("service streams are independent") {
  const LoadPattern p = LoadPattern::random(11);
  const int n = 100000;
  std::map<std::pair<double, double>, int> joint;
  int equal = 0;
  for (int t = 0; t < n; ++t) {
    const double a = random_load(p, 0, t), b = random_load(p, 1, t);
    ++joint[{a, b}];
    equal += a == b;
  }
  CHECK(joint.size() == 16);
  for (const auto& [k, c] : joint) CHECK(std::abs(c / double(n) - 1.0 / 16) <= 0.005);
  CHECK(std::abs(equal / double(n) - 0.25) <= 0.01);
}

TEST_CASE("sinusoid examples") {
  LoadPattern p = LoadPattern::sinusoidal(100.0, {0.0, std::numbers::pi / 2});
  CHECK(sinusoidal_load(p, 0, 0) == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(sinusoidal_load(p, 0, 25) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(sinusoidal_load(p, 0, 75) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(sinusoidal_load(p, 1, 0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(sinusoidal_load(p, 1, 50) == doctest::Approx(5.0).epsilon(1e-12));
  for (std::size_t t = 0; t < 300; t += 7) {
    const double expected = 12.5 + 7.5 * std::sin(2 * std::numbers::pi * t / 100.0);
    CHECK(std::abs(sinusoidal_load(p, 0, t) - expected) < 1e-9);
  }
}

TEST_CASE("sinusoid stays in [5, 20] and has period T") {
  for (double period : {100.0, 37.0, 12.5}) {
    const LoadPattern p = LoadPattern::sinusoidal(period, {0.3, 2.0});
    for (std::size_t t = 0; t < 2000; ++t)
      for (std::size_t s = 0; s < 2; ++s) {
        const double l = sinusoidal_load(p, s, t);
        CHECK(l >= 5.0 - 1e-12);
        CHECK(l <= 20.0 + 1e-12);
        if (std::floor(period) == period)
          CHECK(std::abs(l - sinusoidal_load(p, s, t + static_cast<std::size_t>(period))) <= 1e-9);
      }
  }
}

TEST_CASE("wrong pattern kind is rejected") {
  CHECK_THROWS_AS(random_load(LoadPattern::sinusoidal(), 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sinusoidal_load(LoadPattern::random(1), 0, 0), std::invalid_argument);
}

TEST_CASE("pattern validation") {
  LoadPattern p = LoadPattern::sinusoidal(0.0);
  CHECK_THROWS(p.validate());
  p = LoadPattern::random(1);
  p.random_levels.clear();
  CHECK_THROWS(p.validate());
  p.random_levels = {5, -1};
  CHECK_THROWS(p.validate());
  CHECK(LoadPattern::random(1).max_load() == 20.0);
  CHECK(LoadPattern::sinusoidal().max_load() == doctest::Approx(20.0));
}

TEST_CASE("offered_loads dispatches on kind") {
  const LoadPattern s = LoadPattern::sinusoidal();
  const LoadPair l = offered_loads(s, 25);
  CHECK(l.l1 == doctest::Approx(20.0));
  CHECK(l.l2 == doctest::Approx(12.5));
}

}
