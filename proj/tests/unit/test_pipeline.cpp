#include <stdexcept>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "meshrl/pipeline.hpp"

using namespace meshrl;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny(const std::string& dir) {
  auto c = parse_config(R"({
    "seed": 11,
    "collection": {"steps": 1500},
    "surrogate": {"num_trees": 8},
    "training": {"total_steps": 1024, "hidden": 16},
    "evaluation": {"random_steps": 20, "sinusoidal_steps": 30}
  })");
  c.output_dir = fs::temp_directory_path() / "meshrl-pipeline-test" / dir;
  fs::remove_all(c.output_dir);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("two runs from scratch give byte-identical outputs") {
  Pipeline a(tiny("a")), b(tiny("b"));
  const auto ra = a.run();
  const auto rb = b.run();
  REQUIRE(ra.size() == 4);
  CHECK(slurp(a.results_path()) == slurp(b.results_path()));
  CHECK(slurp(a.trace_path()) == slurp(b.trace_path()));
  CHECK(slurp(a.policy_path(ObjectiveKind::MO1)) == slurp(b.policy_path(ObjectiveKind::MO1)));
  CHECK(fs::exists(a.model_path()));
  CHECK(fs::exists(a.accuracy_path()));
  CHECK(fs::exists(a.curve_path(ObjectiveKind::MO1)));
  CHECK(fs::exists(a.baselines_path()));
  CHECK(fs::exists(a.report_path(1, "simulation", "random")));
  for (const auto& r : ra) {
    CHECK(r.scenario == 1);
    CHECK(r.anr >= 0.0);
    CHECK(r.anr <= 1.0 + 1e-9);
  }
  CHECK(a.accuracy().has_value());
}

TEST_CASE("a second run reuses current outputs and --force reruns them") {
  const auto config = tiny("resume");
  {
    Pipeline p(config);
    p.run();
    CHECK(p.skipped().empty());
  }
  const std::string before = slurp(Pipeline(config).results_path());
  {
    Pipeline p(config);
    p.run();
    CHECK(p.skipped().size() == 4);
    CHECK(slurp(p.results_path()) == before);
  }
  {
    Pipeline p(config, {true, nullptr});
    p.run();
    CHECK(p.skipped().empty());
    CHECK(slurp(p.results_path()) == before);
  }
  {
    ScenarioConfig changed = config;
    changed.evaluation.random_steps = 10;
    Pipeline p(changed);
    p.run();
    const auto& s = p.skipped();
    CHECK(std::find(s.begin(), s.end(), "collect") != s.end());
    CHECK(std::find(s.begin(), s.end(), "train MO1") != s.end());
    CHECK(std::find(s.begin(), s.end(), "evaluate") == s.end());
  }
}

TEST_CASE("the contrast stage runs when MO1 and MO2 are both present") {
  auto config = tiny("contrast");
  config.objectives = {ManagementObjective::defaults(ObjectiveKind::MO1),
                       ManagementObjective::defaults(ObjectiveKind::MO2)};
  Pipeline p(config);
  const auto rows = p.run();
  CHECK(rows.size() == 8);
  CHECK(fs::exists(p.contrast_path()));
  CHECK(p.baselines().size() == 8);
}

TEST_CASE("sweep lists every grid action") {
  const ActionGrid grid(6);
  GroundTruthParams gt;
  gt.noise_rel = 0.0;
  const std::string text = sweep(grid, ground_truth_delays(gt),
                                 ManagementObjective::defaults(ObjectiveKind::MO1), {10, 10});
  CHECK(std::count(text.begin(), text.end(), '\n') >= 1296 + 1);
  CHECK(text.find(std::string(kSweepColumns)) != std::string::npos);
}

}
