#include "meshrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "meshrl/rng.hpp"

namespace meshrl {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Reads the keys of one JSON object and remembers which were consumed so that
// leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* take(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = take(key)) out = as_number(*v, join(path_, key));
  }

  template <class T>
  void count(const std::string& key, T& out) {
    if (const json* v = take(key)) out = static_cast<T>(as_count(*v, join(path_, key)));
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <std::size_t N>
  void numbers(const std::string& key, std::array<double, N>& out) {
    if (const json* v = take(key)) {
      const std::string field = join(path_, key);
      if (!v->is_array() || v->size() != N)
        throw ConfigError(field, "expected an array of " + std::to_string(N) + " numbers");
      for (std::size_t i = 0; i < N; ++i)
        out[i] = as_number((*v)[i], field + "[" + std::to_string(i) + "]");
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      const std::string field = join(path_, key);
      if (!v->is_array() || v->empty()) throw ConfigError(field, "expected a non-empty array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(as_number((*v)[i], field + "[" + std::to_string(i) + "]"));
    }
  }

  void matrix(const std::string& key,
              std::array<std::array<double, kNumNodes>, kNumServices>& out) {
    if (const json* v = take(key)) {
      const std::string field = join(path_, key);
      if (!v->is_array() || v->size() != kNumServices)
        throw ConfigError(field, "expected one row per service");
      for (std::size_t i = 0; i < kNumServices; ++i) {
        const json& row = (*v)[i];
        const std::string rf = field + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != kNumNodes)
          throw ConfigError(rf, "expected one value per processing node");
        for (std::size_t k = 0; k < kNumNodes; ++k)
          out[i][k] = as_number(row[k], rf + "[" + std::to_string(k) + "]");
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
  }

  const std::string& path() const noexcept { return path_; }

  static double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
  }

  static std::uint64_t as_count(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) throw ConfigError(field, "must not be negative");
    throw ConfigError(field, "expected a non-negative integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a component's own validate() and re-labels its message with `field`.
template <class F>
void check(const std::string& field, F&& validate) {
  try {
    validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    // "<key> must ..." names the key; report it as field.key.
    const std::string message = e.what();
    const auto space = message.find(' ');
    const std::string key = message.substr(0, space);
    const bool names_key =
        space != std::string::npos && message.compare(space, 6, " must ") == 0 &&
        std::all_of(key.begin(), key.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)) || c == '_'; });
    throw ConfigError(names_key ? field + "." + key : field, message);
  }
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void read_ground_truth(const json& j, GroundTruthParams& gt) {
  Reader r(j, "ground_truth");
  r.numbers("capacity", gt.capacity);
  r.matrix("work_cost", gt.work_cost);
  r.matrix("base_delay", gt.base_delay);
  r.number("front_delay", gt.front_delay);
  r.number("max_delay", gt.max_delay);
  r.number("noise_rel", gt.noise_rel);
  r.finish();
}

void read_collection(const json& j, CollectionSpec& c) {
  Reader r(j, "collection");
  std::string mode = to_string(c.mode);
  r.string("mode", mode);
  check("collection.mode", [&] { c.mode = collection_mode_from_string(mode); });
  r.count("steps", c.steps);
  r.count("repetitions", c.repetitions);
  r.numbers("load_levels", c.load_levels);
  r.finish();
}

void read_surrogate(const json& j, SurrogateOptions& s) {
  Reader r(j, "surrogate");
  r.count("num_trees", s.num_trees);
  r.count("max_depth", s.max_depth);
  r.count("min_leaf", s.min_leaf);
  r.count("threads", s.threads);
  r.finish();
}

ManagementObjective read_objective(const json& j, const std::string& path) {
  if (j.is_string()) {
    ManagementObjective mo;
    check(path, [&] { mo = ManagementObjective::defaults(objective_kind_from_string(j.get<std::string>())); });
    return mo;
  }
  Reader r(j, path);
  std::string kind;
  r.string("kind", kind);
  require(!kind.empty(), join(path, "kind"), "required");
  ManagementObjective mo;
  check(join(path, "kind"), [&] { mo = ManagementObjective::defaults(objective_kind_from_string(kind)); });
  r.numbers("delay_bounds", mo.delay_bounds);
  r.numbers("utility_weights", mo.utility_weights);
  r.number("starvation_threshold", mo.starvation_threshold);
  r.number("delay_steepness", mo.delay_steepness);
  r.number("load_steepness", mo.load_steepness);
  r.finish();
  check(path, [&] { mo.validate(); });
  return mo;
}

void read_training(const json& j, TrainConfig& t) {
  Reader r(j, "training");
  r.number("learning_rate", t.learning_rate);
  r.number("gamma", t.gamma);
  r.number("gae_lambda", t.gae_lambda);
  r.count("batch_size", t.batch_size);
  r.count("rollout_length", t.rollout_length);
  r.number("clip_ratio", t.clip_ratio);
  r.count("epochs_per_update", t.epochs_per_update);
  r.count("total_steps", t.total_steps);
  r.number("entropy_coeff", t.entropy_coeff);
  r.number("value_coeff", t.value_coeff);
  r.number("max_grad_norm", t.max_grad_norm);
  r.number("adam_epsilon", t.adam_epsilon);
  r.boolean("normalize_advantage", t.normalize_advantage);
  std::string head = to_string(t.head);
  r.string("head", head);
  check("training.head", [&] { t.head = head_layout_from_string(head); });
  r.count("hidden", t.hidden);
  r.number("load_scale", t.normalizer.load_scale);
  r.finish();
}

void read_load_patterns(const json& j, LoadPattern& sin, std::vector<double>& levels) {
  Reader r(j, "load_patterns");
  r.numbers("random_levels", levels);
  r.number("period", sin.period);
  r.numbers("phase", sin.phase);
  r.finish();
}

void read_evaluation(const json& j, EvaluationSpec& e) {
  Reader r(j, "evaluation");
  r.count("random_steps", e.random_steps);
  r.count("sinusoidal_steps", e.sinusoidal_steps);
  r.boolean("greedy", e.greedy);
  r.boolean("baselines", e.baselines);
  r.boolean("contrast", e.contrast);
  r.number("peak_fraction", e.peak_fraction);
  r.finish();
}

void read_floors(const json& j, AcceptanceFloors& f) {
  Reader r(j, "floors");
  r.number("nmae_ratio", f.nmae_ratio);
  r.number("r2", f.r2);
  r.number("trained_anr", f.trained_anr);
  r.number("baseline_gap", f.baseline_gap);
  r.finish();
}

json to_json(const GroundTruthParams& gt) {
  return {{"capacity", gt.capacity},       {"work_cost", gt.work_cost},
          {"base_delay", gt.base_delay},   {"front_delay", gt.front_delay},
          {"max_delay", gt.max_delay},     {"noise_rel", gt.noise_rel}};
}

json to_json(const CollectionSpec& c) {
  return {{"mode", to_string(c.mode)},
          {"steps", c.steps},
          {"repetitions", c.repetitions},
          {"load_levels", c.load_levels}};
}

json to_json(const ManagementObjective& mo) {
  return {{"kind", std::string(to_string(mo.kind))},
          {"delay_bounds", mo.delay_bounds},
          {"utility_weights", mo.utility_weights},
          {"starvation_threshold", mo.starvation_threshold},
          {"delay_steepness", mo.delay_steepness},
          {"load_steepness", mo.load_steepness}};
}

json to_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"gamma", t.gamma},
          {"gae_lambda", t.gae_lambda},
          {"batch_size", t.batch_size},
          {"rollout_length", t.rollout_length},
          {"clip_ratio", t.clip_ratio},
          {"epochs_per_update", t.epochs_per_update},
          {"total_steps", t.total_steps},
          {"entropy_coeff", t.entropy_coeff},
          {"value_coeff", t.value_coeff},
          {"max_grad_norm", t.max_grad_norm},
          {"adam_epsilon", t.adam_epsilon},
          {"normalize_advantage", t.normalize_advantage},
          {"head", to_string(t.head)},
          {"hidden", t.hidden},
          {"load_scale", t.normalizer.load_scale}};
}

json load_patterns_json(const ScenarioConfig& c) {
  return {{"random_levels", c.sinusoid.random_levels},
          {"period", c.sinusoid.period},
          {"phase", c.sinusoid.phase}};
}

json to_json(const EvaluationSpec& e) {
  return {{"random_steps", e.random_steps},
          {"sinusoidal_steps", e.sinusoidal_steps},
          {"greedy", e.greedy},
          {"baselines", e.baselines},
          {"contrast", e.contrast},
          {"peak_fraction", e.peak_fraction}};
}

json to_json(const AcceptanceFloors& f) {
  return {{"nmae_ratio", f.nmae_ratio},
          {"r2", f.r2},
          {"trained_anr", f.trained_anr},
          {"baseline_gap", f.baseline_gap}};
}

std::string digest(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void ScenarioConfig::validate() const {
  check("ground_truth", [&] { ground_truth.validate(); });
  require(grid_levels >= 2 && grid_levels <= 16, "grid_levels", "must be in [2, 16]");
  require(collection.steps >= 1, "collection.steps", "must be at least 1");
  require(collection.repetitions >= 1, "collection.repetitions", "must be at least 1");
  for (double l : collection.load_levels)
    require(l >= 0.0, "collection.load_levels", "loads must be non-negative");
  if (collection.mode == CollectionMode::Random)
    require(collection.steps >= 2 * kMinFitRecords, "collection.steps",
            "must leave at least " + std::to_string(kMinFitRecords) + " training records");
  require(surrogate.num_trees >= 1, "surrogate.num_trees", "must be at least 1");
  require(surrogate.max_depth >= 1, "surrogate.max_depth", "must be at least 1");
  require(surrogate.min_leaf >= 1, "surrogate.min_leaf", "must be at least 1");
  require(!objectives.empty(), "objectives", "at least one objective is required");
  std::set<ObjectiveKind> kinds;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    const std::string field = "objectives[" + std::to_string(i) + "]";
    check(field, [&] { objectives[i].validate(); });
    require(kinds.insert(objectives[i].kind).second, field, "duplicate objective");
  }
  check("training", [&] { training.validate(); });
  check("load_patterns", [&] { sinusoid.validate(); });
  LoadPattern rnd = LoadPattern::random(0);
  rnd.random_levels = sinusoid.random_levels;
  check("load_patterns.random_levels", [&] { rnd.validate(); });
  require(evaluation.random_steps >= 1, "evaluation.random_steps", "must be at least 1");
  require(evaluation.sinusoidal_steps >= 1, "evaluation.sinusoidal_steps", "must be at least 1");
  require(evaluation.peak_fraction > 0.0 && evaluation.peak_fraction <= 1.0,
          "evaluation.peak_fraction", "must be in (0, 1]");
  require(floors.nmae_ratio > 0.0, "floors.nmae_ratio", "must be positive");
  require(floors.r2 <= 1.0, "floors.r2", "must be at most 1");
  require(!output_dir.empty(), "output_dir", "must not be empty");
}

std::uint64_t ScenarioConfig::collection_seed() const { return derive_seed(seed, "collect"); }
std::uint64_t ScenarioConfig::noise_seed() const { return derive_seed(seed, "ground-truth"); }
std::uint64_t ScenarioConfig::surrogate_seed() const { return derive_seed(seed, "surrogate"); }
std::uint64_t ScenarioConfig::training_seed(ObjectiveKind kind) const {
  return mix_seed(derive_seed(seed, "train"), static_cast<std::uint64_t>(scenario_id(kind)), 0);
}
std::uint64_t ScenarioConfig::training_load_seed() const {
  return derive_seed(seed, "train-load");
}
std::uint64_t ScenarioConfig::evaluation_seed() const { return derive_seed(seed, "evaluate"); }
std::uint64_t ScenarioConfig::evaluation_load_seed() const {
  return derive_seed(seed, "evaluate-load");
}

GroundTruthParams ScenarioConfig::environment() const {
  GroundTruthParams gt = ground_truth;
  gt.seed = noise_seed();
  return gt;
}

TrainConfig ScenarioConfig::training_for(ObjectiveKind kind) const {
  TrainConfig t = training;
  t.seed = training_seed(kind);
  t.normalizer.delay_scale = ground_truth.max_delay;
  return t;
}

const ManagementObjective* ScenarioConfig::objective(ObjectiveKind kind) const {
  for (const auto& mo : objectives)
    if (mo.kind == kind) return &mo;
  return nullptr;
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ScenarioConfig c;
  Reader r(j, "");
  r.count("seed", c.seed);
  r.count("grid_levels", c.grid_levels);
  std::string out = c.output_dir.string();
  r.string("output_dir", out);
  c.output_dir = out;
  if (const json* v = r.take("ground_truth")) read_ground_truth(*v, c.ground_truth);
  if (const json* v = r.take("collection")) read_collection(*v, c.collection);
  if (const json* v = r.take("surrogate")) read_surrogate(*v, c.surrogate);
  if (const json* v = r.take("objectives")) {
    if (!v->is_array()) throw ConfigError("objectives", "expected an array");
    c.objectives.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      c.objectives.push_back(read_objective((*v)[i], "objectives[" + std::to_string(i) + "]"));
  }
  if (const json* v = r.take("training")) read_training(*v, c.training);
  if (const json* v = r.take("load_patterns"))
    read_load_patterns(*v, c.sinusoid, c.sinusoid.random_levels);
  if (const json* v = r.take("evaluation")) read_evaluation(*v, c.evaluation);
  if (const json* v = r.take("floors")) read_floors(*v, c.floors);
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c) {
  json objectives = json::array();
  for (const auto& mo : c.objectives) objectives.push_back(to_json(mo));
  const json j = {{"seed", c.seed},
                  {"grid_levels", c.grid_levels},
                  {"output_dir", c.output_dir.string()},
                  {"ground_truth", to_json(c.ground_truth)},
                  {"collection", to_json(c.collection)},
                  {"surrogate",
                   {{"num_trees", c.surrogate.num_trees},
                    {"max_depth", c.surrogate.max_depth},
                    {"min_leaf", c.surrogate.min_leaf},
                    {"threads", c.surrogate.threads}}},
                  {"objectives", objectives},
                  {"training", to_json(c.training)},
                  {"load_patterns", load_patterns_json(c)},
                  {"evaluation", to_json(c.evaluation)},
                  {"floors", to_json(c.floors)}};
  return j.dump(2);
}

std::string training_json(const ScenarioConfig& c, ObjectiveKind kind) {
  json j = to_json(c.training_for(kind));
  j["seed"] = c.training_seed(kind);
  j["delay_scale"] = c.ground_truth.max_delay;
  return j.dump();
}

StageHashes stage_hashes(const ScenarioConfig& c) {
  StageHashes h;
  h.collect = digest({{"seed", c.seed},
                      {"grid_levels", c.grid_levels},
                      {"ground_truth", to_json(c.ground_truth)},
                      {"collection", to_json(c.collection)}});
  h.fit = digest({{"upstream", h.collect},
                  {"num_trees", c.surrogate.num_trees},
                  {"max_depth", c.surrogate.max_depth},
                  {"min_leaf", c.surrogate.min_leaf}});
  for (const auto& mo : c.objectives)
    h.train.push_back(digest({{"upstream", h.fit},
                              {"objective", to_json(mo)},
                              {"training", json::parse(training_json(c, mo.kind))},
                              {"load_patterns", load_patterns_json(c)}}));
  h.evaluate = digest({{"upstream", h.train},
                       {"evaluation", to_json(c.evaluation)},
                       {"load_patterns", load_patterns_json(c)}});
  return h;
}

}  // namespace meshrl
