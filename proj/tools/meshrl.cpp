#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meshrl/config.hpp"
#include "meshrl/csv.hpp"
#include "meshrl/oracle.hpp"
#include "meshrl/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRuntimeError = 2, kFloorViolation = 3 };

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_noise = false;
  bool strict = false;
  bool force = false;
  std::vector<std::string> objectives;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", f.out, "Output directory (overrides the config)");
  cmd->add_flag("--no-noise", f.no_noise, "Disable ground-truth delay noise");
  cmd->add_flag("--strict", f.strict, "Exit with status 3 when an acceptance floor is missed");
  cmd->add_flag("--force", f.force, "Rerun stages whose outputs are already current");
  cmd->add_option("--objectives", f.objectives, "Objectives to run (MO1 MO2 MO3)")
      ->delimiter(',');
}

meshrl::ScenarioConfig resolve(const CommonFlags& f) {
  meshrl::ScenarioConfig c = f.config.empty() ? meshrl::ScenarioConfig{} : meshrl::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.no_noise) c.ground_truth.noise_rel = 0.0;
  if (!f.objectives.empty()) {
    std::vector<meshrl::ManagementObjective> picked;
    for (const auto& name : f.objectives) {
      meshrl::ObjectiveKind kind;
      try {
        kind = meshrl::objective_kind_from_string(name);
      } catch (const std::exception& e) {
        throw meshrl::ConfigError("--objectives", e.what());
      }
      const auto* existing = c.objective(kind);
      picked.push_back(existing ? *existing : meshrl::ManagementObjective::defaults(kind));
    }
    c.objectives = std::move(picked);
  }
  c.validate();
  return c;
}

int finish(const meshrl::Pipeline& p, bool strict) {
  if (p.violations().empty()) return kOk;
  std::cerr << p.violations().size() << " acceptance floor(s) missed\n";
  return strict ? kFloorViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned-surrogate routing and admission control experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* collect = app.add_subcommand("collect", "Record a ground-truth trace");
  auto* fit = app.add_subcommand("fit", "Fit the delay surrogate on the trace");
  auto* train = app.add_subcommand("train", "Train one policy per objective");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate trained policies");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
  auto* sweep = app.add_subcommand("sweep", "Dump the reward landscape at one load pair");
  for (auto* cmd : {collect, fit, train, evaluate, pipeline, sweep}) add_common(cmd, flags);

  double l1 = 10.0, l2 = 10.0;
  std::string sweep_objective = "MO1";
  std::string delay_model = "surrogate";
  sweep->add_option("--l1", l1, "Offered load of service 1")->check(CLI::NonNegativeNumber);
  sweep->add_option("--l2", l2, "Offered load of service 2")->check(CLI::NonNegativeNumber);
  sweep->add_option("--objective", sweep_objective, "MO1, MO2 or MO3");
  sweep->add_option("--delay-model", delay_model, "surrogate or ground-truth")
      ->check(CLI::IsMember({"surrogate", "ground-truth"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    const meshrl::ScenarioConfig config = resolve(flags);
    meshrl::Pipeline p(config, {flags.force, &std::cerr});

    if (collect->parsed()) {
      p.collect();
    } else if (fit->parsed()) {
      p.fit();
    } else if (train->parsed()) {
      p.train();
    } else if (evaluate->parsed()) {
      p.evaluate();
    } else if (pipeline->parsed()) {
      p.run();
      std::cout << meshrl::results_csv(p.evaluate(), p.hashes().evaluate);
    } else if (sweep->parsed()) {
      meshrl::ManagementObjective mo;
      try {
        const auto kind = meshrl::objective_kind_from_string(sweep_objective);
        const auto* configured = config.objective(kind);
        mo = configured ? *configured : meshrl::ManagementObjective::defaults(kind);
      } catch (const std::exception& e) {
        throw meshrl::ConfigError("--objective", e.what());
      }
      const meshrl::ActionGrid grid(config.grid_levels);
      const meshrl::DelayModel delays = delay_model == "surrogate"
                                            ? meshrl::surrogate_delays(p.fit())
                                            : meshrl::ground_truth_delays(config.environment());
      std::ostringstream name;
      name << "sweep_" << sweep_objective << "_" << meshrl::format_number(l1) << "_"
           << meshrl::format_number(l2) << ".csv";
      const auto path = config.output_dir / name.str();
      meshrl::write_file_atomic(path, meshrl::sweep(grid, delays, mo, {l1, l2}));
      std::cerr << "sweep: wrote " << path.string() << '\n';
    }
    return finish(p, flags.strict);
  } catch (const meshrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
