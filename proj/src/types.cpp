#include "meshrl/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshrl {

namespace {

void require_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1], got " +
                                std::to_string(v));
  }
}

}  // namespace

void MeshConfig::validate() const {
  if (num_services != kNumServices) throw std::invalid_argument("num_services must be 2");
  if (num_processing_nodes != kNumNodes)
    throw std::invalid_argument("num_processing_nodes must be 2");
  if (!(time_step_seconds > 0.0)) throw std::invalid_argument("time_step_seconds must be > 0");
}

double Action::routing(std::size_t service, std::size_t node) const {
  if (service >= kNumServices || node >= kNumNodes)
    throw std::out_of_range("service/node index out of range");
  const double first = service == 0 ? p11 : p21;
  return node == 0 ? first : 1.0 - first;
}

double Action::blocking(std::size_t service) const {
  if (service >= kNumServices) throw std::out_of_range("service index out of range");
  return service == 0 ? b1 : b2;
}

void Action::validate() const {
  require_fraction(p11, "p11");
  require_fraction(p21, "p21");
  require_fraction(b1, "b1");
  require_fraction(b2, "b2");
}

void MeshState::validate() const {
  if (!(d1 >= 0 && d2 >= 0 && l1 >= 0 && l2 >= 0))
    throw std::invalid_argument("mesh state fields must be nonnegative");
}

ActionGrid::ActionGrid(int levels) : levels_(levels) {
  if (levels < 2) throw std::invalid_argument("action grid needs at least 2 levels");
  const auto n = static_cast<std::size_t>(levels);
  actions_.reserve(n * n * n * n);
  for (int a = 0; a < levels; ++a)
    for (int b = 0; b < levels; ++b)
      for (int c = 0; c < levels; ++c)
        for (int d = 0; d < levels; ++d)
          actions_.push_back(
              {level_value(a), level_value(b), level_value(c), level_value(d)});
}

double ActionGrid::level_value(int k) const {
  return static_cast<double>(k) / static_cast<double>(levels_ - 1);
}

ActionIndex ActionGrid::index_of(std::array<int, 4> k) const {
  ActionIndex idx = 0;
  for (int v : k) {
    if (v < 0 || v >= levels_) throw std::out_of_range("grid level out of range");
    idx = idx * static_cast<ActionIndex>(levels_) + static_cast<ActionIndex>(v);
  }
  return idx;
}

std::array<int, 4> ActionGrid::level_indices(ActionIndex i) const {
  if (i >= size()) throw std::out_of_range("action index out of range");
  std::array<int, 4> k{};
  for (int d = 3; d >= 0; --d) {
    k[static_cast<std::size_t>(d)] = static_cast<int>(i % static_cast<ActionIndex>(levels_));
    i /= static_cast<ActionIndex>(levels_);
  }
  return k;
}

ActionIndex ActionGrid::nearest(const Action& a) const {
  auto round_level = [this](double v) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (levels_ - 1)));
  };
  return index_of({round_level(a.p11), round_level(a.p21), round_level(a.b1), round_level(a.b2)});
}

ActionGrid build_action_grid(int levels) { return ActionGrid(levels); }

double carried_load(double offered, double blocking) {
  if (!(blocking >= 0.0 && blocking <= 1.0))
    throw std::invalid_argument("blocking rate must lie in [0,1]");
  if (!(offered >= 0.0)) throw std::invalid_argument("offered load must be nonnegative");
  return offered * (1.0 - blocking);
}

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::MO1: return "MO1";
    case ObjectiveKind::MO2: return "MO2";
    case ObjectiveKind::MO3: return "MO3";
  }
  throw std::invalid_argument("unknown objective kind");
}

ObjectiveKind objective_kind_from_string(std::string_view name) {
  if (name == "MO1" || name == "mo1" || name == "1") return ObjectiveKind::MO1;
  if (name == "MO2" || name == "mo2" || name == "2") return ObjectiveKind::MO2;
  if (name == "MO3" || name == "mo3" || name == "3") return ObjectiveKind::MO3;
  throw std::invalid_argument("unknown objective kind '" + std::string(name) + "'");
}

int scenario_id(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::MO1: return 1;
    case ObjectiveKind::MO2: return 2;
    case ObjectiveKind::MO3: return 3;
  }
  throw std::invalid_argument("unknown objective kind");
}

ManagementObjective ManagementObjective::defaults(ObjectiveKind kind) {
  ManagementObjective mo;
  mo.kind = kind;
  return mo;
}

void ManagementObjective::validate() const {
  if (kind != ObjectiveKind::MO1 && kind != ObjectiveKind::MO2 && kind != ObjectiveKind::MO3)
    throw std::invalid_argument("unknown objective kind");
  for (double o : delay_bounds)
    if (!(o > 0.0)) throw std::invalid_argument("delay bounds must be > 0");
  for (double u : utility_weights)
    if (!(u > 0.0)) throw std::invalid_argument("utility weights must be > 0");
  if (!(starvation_threshold >= 0.0))
    throw std::invalid_argument("starvation threshold must be >= 0");
  if (!(delay_steepness > 0.0) || !(load_steepness > 0.0))
    throw std::invalid_argument("reward steepness must be > 0");
}

}  // namespace meshrl
