#include "meshrl/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>

#include "meshrl/evalharness.hpp"
#include "meshrl/oracle.hpp"

namespace meshrl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool header_matches(const std::filesystem::path& path, const std::string& hash) {
  return std::filesystem::exists(path) && read_csv_header(path).get("config") == hash;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct Cell {
  EnvironmentKind env;
  LoadKind pattern;
};

constexpr Cell kCells[] = {{EnvironmentKind::Simulation, LoadKind::Random},
                           {EnvironmentKind::Simulation, LoadKind::Sinusoidal},
                           {EnvironmentKind::GroundTruth, LoadKind::Random},
                           {EnvironmentKind::GroundTruth, LoadKind::Sinusoidal}};

struct ObjectiveResults {
  std::vector<ResultRow> rows;
  std::vector<ResultRow> baselines;
};

}  // namespace

Pipeline::Pipeline(ScenarioConfig config, PipelineOptions options)
    : config_(std::move(config)),
      options_(options),
      hashes_(stage_hashes(config_)),
      grid_(config_.grid_levels) {
  config_.validate();
}

void Pipeline::note(const std::string& message) const {
  if (options_.log) *options_.log << message << '\n' << std::flush;
}

std::filesystem::path Pipeline::trace_path() const { return config_.output_dir / "trace.csv"; }
std::filesystem::path Pipeline::model_path() const { return config_.output_dir / "model.bin"; }
std::filesystem::path Pipeline::accuracy_path() const {
  return config_.output_dir / "accuracy.csv";
}
std::filesystem::path Pipeline::policy_path(ObjectiveKind kind) const {
  return config_.output_dir / ("policy_" + lower(to_string(kind)) + ".json");
}
std::filesystem::path Pipeline::curve_path(ObjectiveKind kind) const {
  return config_.output_dir / ("curve_" + lower(to_string(kind)) + ".csv");
}
std::filesystem::path Pipeline::report_path(int scenario, const std::string& env,
                                            const std::string& pattern) const {
  return config_.output_dir /
         ("report_s" + std::to_string(scenario) + "_" + env + "_" + pattern + ".csv");
}
std::filesystem::path Pipeline::results_path() const { return config_.output_dir / "results.csv"; }
std::filesystem::path Pipeline::baselines_path() const {
  return config_.output_dir / "baselines.csv";
}
std::filesystem::path Pipeline::contrast_path() const {
  return config_.output_dir / "contrast.csv";
}

const Trace& Pipeline::collect() {
  if (trace_) return *trace_;
  if (!options_.force && header_matches(trace_path(), hashes_.collect)) {
    trace_ = read_trace_csv(trace_path());
    skipped_.push_back("collect");
    note("collect: reusing " + trace_path().string() + " (" + std::to_string(trace_->size()) +
         " records)");
    return *trace_;
  }
  const GroundTruthParams env = config_.environment();
  const auto& c = config_.collection;
  trace_ = c.mode == CollectionMode::Random
               ? collect_trace_random(env, c.steps, config_.collection_seed(), grid_, c.load_levels)
               : collect_trace_grid(env, c.repetitions, config_.collection_seed(), grid_,
                                    c.load_levels);
  write_trace_csv(trace_path(), *trace_, hashes_.collect);
  note("collect: wrote " + trace_path().string() + " (" + std::to_string(trace_->size()) +
       " records)");
  return *trace_;
}

const SystemModel& Pipeline::fit() {
  if (model_) return *model_;
  const auto [train_set, test_set] = split_train_test(collect());
  if (!options_.force && std::filesystem::exists(model_path())) {
    SystemModel m = SystemModel::load(model_path());
    if (m.tag == hashes_.fit) {
      model_ = std::move(m);
      skipped_.push_back("fit");
      note("fit: reusing " + model_path().string());
    }
  }
  if (!model_) {
    SurrogateOptions opts = config_.surrogate;
    opts.seed = config_.surrogate_seed();
    SystemModel m = fit_system_model(train_set, opts);
    m.tag = hashes_.fit;
    m.save(model_path());
    model_ = std::move(m);
    note("fit: wrote " + model_path().string() + " (" + std::to_string(train_set.size()) +
         " training records)");
  }
  accuracy_ = evaluate_model(*model_, test_set);
  write_file_atomic(accuracy_path(), accuracy_csv(*accuracy_, hashes_.fit));
  note("fit: NMAE d1 " + fixed(accuracy_->nmae_d1) + " (naive " + fixed(accuracy_->naive_nmae_d1) +
       ", R2 " + fixed(accuracy_->r2_d1) + "), d2 " + fixed(accuracy_->nmae_d2) + " (naive " +
       fixed(accuracy_->naive_nmae_d2) + ", R2 " + fixed(accuracy_->r2_d2) + ")");
  check_accuracy(*accuracy_);
  return *model_;
}

void Pipeline::check_accuracy(const ModelAccuracy& acc) {
  const auto& f = config_.floors;
  const std::pair<const char*, std::array<double, 3>> targets[] = {
      {"d1", {acc.nmae_d1, acc.naive_nmae_d1, acc.r2_d1}},
      {"d2", {acc.nmae_d2, acc.naive_nmae_d2, acc.r2_d2}}};
  for (const auto& [name, v] : targets) {
    if (v[0] > f.nmae_ratio * v[1]) {
      violations_.push_back(std::string("surrogate NMAE ") + name + " " + fixed(v[0]) +
                            " exceeds " + fixed(f.nmae_ratio, 3) + " x naive " + fixed(v[1]));
      note("warning: " + violations_.back());
    }
    if (v[2] < f.r2) {
      violations_.push_back(std::string("surrogate R2 ") + name + " " + fixed(v[2]) + " below " +
                            fixed(f.r2, 3));
      note("warning: " + violations_.back());
    }
  }
}

const std::vector<PolicyNet>& Pipeline::train() {
  if (!policies_.empty()) return policies_;
  const SystemModel& model = fit();
  const auto& objectives = config_.objectives;
  std::vector<std::optional<PolicyNet>> ready(objectives.size());
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    const auto path = policy_path(objectives[i].kind);
    if (options_.force || !std::filesystem::exists(path) ||
        !header_matches(curve_path(objectives[i].kind), hashes_.train[i]))
      continue;
    PolicyNet net = PolicyNet::load(path);
    if (net.tag != hashes_.train[i]) continue;
    ready[i] = std::move(net);
    skipped_.push_back("train " + std::string(to_string(objectives[i].kind)));
    note("train " + std::string(to_string(objectives[i].kind)) + ": reusing " + path.string());
  }

  LoadPattern pattern = LoadPattern::random(config_.training_load_seed());
  pattern.random_levels = config_.sinusoid.random_levels;

  std::vector<std::future<TrainResult>> jobs(objectives.size());
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (ready[i]) continue;
    jobs[i] = std::async(std::launch::async, [this, &model, &pattern, &objectives, i] {
      Simulator sim(model, grid_);
      return meshrl::train(sim, objectives[i], pattern, config_.training_for(objectives[i].kind));
    });
  }
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (ready[i]) continue;
    TrainResult res = jobs[i].get();
    const ObjectiveKind kind = objectives[i].kind;
    res.policy.tag = hashes_.train[i];
    res.policy.config_json = training_json(config_, kind);
    res.policy.save(policy_path(kind));
    write_file_atomic(curve_path(kind), curve_csv(res.curve, to_string(kind), hashes_.train[i]));
    note("train " + std::string(to_string(kind)) + ": " + std::to_string(res.curve.size()) +
         " rollouts, final rollout ANR " + fixed(res.curve.back().anr));
    ready[i] = std::move(res.policy);
  }
  for (auto& p : ready) policies_.push_back(std::move(*p));
  return policies_;
}

const std::vector<ResultRow>& Pipeline::evaluate() {
  if (evaluated_) return results_;
  const auto& objectives = config_.objectives;
  const bool want_baselines = config_.evaluation.baselines;
  if (!options_.force && header_matches(results_path(), hashes_.evaluate) &&
      (!want_baselines || header_matches(baselines_path(), hashes_.evaluate))) {
    results_ = read_results_csv(results_path());
    if (want_baselines) baselines_ = read_results_csv(baselines_path());
    evaluated_ = true;
    skipped_.push_back("evaluate");
    note("evaluate: reusing " + results_path().string());
    check_results();
    return results_;
  }

  const std::vector<PolicyNet>& policies = train();
  const SystemModel& model = *model_;
  const GroundTruthParams env = config_.environment();
  const auto& spec = config_.evaluation;
  const std::uint64_t seed = config_.evaluation_seed();
  LoadPattern random_pattern = LoadPattern::random(config_.evaluation_load_seed());
  random_pattern.random_levels = config_.sinusoid.random_levels;
  const LoadPattern& sin_pattern = config_.sinusoid;

  auto run_objective = [&](std::size_t i) {
    Evaluator evaluator(model, env, grid_);
    const ManagementObjective& mo = objectives[i];
    NetPolicy policy(policies[i], spec.greedy ? ActMode::Greedy : ActMode::Sample, seed);
    ObjectiveResults out;
    for (const Cell& cell : kCells) {
      const bool random = cell.pattern == LoadKind::Random;
      const LoadPattern& pattern = random ? random_pattern : sin_pattern;
      const std::size_t steps = random ? spec.random_steps : spec.sinusoidal_steps;
      const auto report = evaluator.run_scenario(policy, cell.env, mo, pattern, steps,
                                                 default_reference(cell.env), seed);
      write_file_atomic(report_path(report.scenario, to_string(cell.env), to_string(cell.pattern)),
                        report_csv(report));
      out.rows.push_back({report.scenario, to_string(cell.env), to_string(cell.pattern), steps,
                          report.anr});
      if (want_baselines) {
        const auto base = evaluator.random_baseline(cell.env, mo, pattern, steps, seed);
        out.baselines.push_back({base.scenario, to_string(cell.env), to_string(cell.pattern),
                                 steps, base.anr});
      }
    }
    return out;
  };

  std::vector<std::future<ObjectiveResults>> jobs;
  for (std::size_t i = 0; i < objectives.size(); ++i)
    jobs.push_back(std::async(std::launch::async, run_objective, i));
  results_.clear();
  baselines_.clear();
  for (auto& job : jobs) {
    ObjectiveResults r = job.get();
    results_.insert(results_.end(), r.rows.begin(), r.rows.end());
    baselines_.insert(baselines_.end(), r.baselines.begin(), r.baselines.end());
  }

  const ManagementObjective* mo1 = config_.objective(ObjectiveKind::MO1);
  const ManagementObjective* mo2 = config_.objective(ObjectiveKind::MO2);
  if (spec.contrast && mo1 && mo2) {
    Evaluator evaluator(model, env, grid_);
    const auto index = [&](const ManagementObjective* mo) {
      return static_cast<std::size_t>(mo - objectives.data());
    };
    NetPolicy first(policies[index(mo1)]);
    NetPolicy second(policies[index(mo2)]);
    const auto contrast =
        objective_contrast(first, second, evaluator, sin_pattern, spec.sinusoidal_steps);
    write_file_atomic(contrast_path(), contrast_csv(contrast));
    const auto a = peak_blocking(contrast.loads, contrast.first, spec.peak_fraction);
    const auto b = peak_blocking(contrast.loads, contrast.second, spec.peak_fraction);
    note("contrast: peak blocking MO1 (b1 " + fixed(a.b1, 3) + ", b2 " + fixed(a.b2, 3) +
         "), MO2 (b1 " + fixed(b.b1, 3) + ", b2 " + fixed(b.b2, 3) + ") over " +
         std::to_string(a.steps) + " steps");
  }

  // Written last: its hash marks the whole stage complete.
  if (want_baselines) write_file_atomic(baselines_path(), results_csv(baselines_, hashes_.evaluate));
  write_file_atomic(results_path(), results_csv(results_, hashes_.evaluate));
  for (const auto& r : results_)
    note("evaluate: scenario " + std::to_string(r.scenario) + " " + r.environment + " " +
         r.load_pattern + " ANR " + fixed(r.anr));
  evaluated_ = true;
  check_results();
  return results_;
}

void Pipeline::check_results() {
  const auto& f = config_.floors;
  const std::size_t first_new = violations_.size();
  for (std::size_t i = 0; i < results_.size(); ++i) {
    const auto& r = results_[i];
    const std::string cell = "scenario " + std::to_string(r.scenario) + " " + r.environment +
                             " " + r.load_pattern;
    if (r.anr < f.trained_anr)
      violations_.push_back(cell + " ANR " + fixed(r.anr) + " below " + fixed(f.trained_anr, 3));
    if (i < baselines_.size() && r.anr - baselines_[i].anr < f.baseline_gap)
      violations_.push_back(cell + " ANR " + fixed(r.anr) + " within " +
                            fixed(f.baseline_gap, 3) + " of random baseline " +
                            fixed(baselines_[i].anr));
  }
  for (std::size_t i = first_new; i < violations_.size(); ++i) note("warning: " + violations_[i]);
}

const std::vector<ResultRow>& Pipeline::run() {
  collect();
  fit();
  train();
  return evaluate();
}

std::string sweep(const ActionGrid& grid, const DelayModel& delays,
                  const ManagementObjective& objective, LoadPair loads) {
  std::vector<Delays> table;
  table.reserve(grid.size());
  for (const Action& a : grid) table.push_back(delays(loads, a));
  const OracleResult best = optimal_from_table(table, objective, loads, grid, true);
  return sweep_csv(grid, table, best, to_string(objective.kind), loads);
}

}  // namespace meshrl
