#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace meshrl {

inline constexpr std::size_t kNumServices = 2;
inline constexpr std::size_t kNumNodes = 2;

using ActionIndex = std::size_t;

/// Two services, a front node and two processing nodes.
struct MeshConfig {
  std::size_t num_services = kNumServices;
  std::size_t num_processing_nodes = kNumNodes;
  double time_step_seconds = 5.0;

  void validate() const;
};

/// Control vector: routing weight of each service to node 1 and the
/// per-service blocking rate. The node-2 weights are implied.
struct Action {
  double p11 = 0.0;
  double p21 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  double p12() const noexcept { return 1.0 - p11; }
  double p22() const noexcept { return 1.0 - p21; }

  /// Fraction of service i (0-based) routed to node j (0-based).
  double routing(std::size_t service, std::size_t node) const;
  double blocking(std::size_t service) const;

  void validate() const;

  friend bool operator==(const Action&, const Action&) = default;
};

struct MeshState {
  double d1 = 0.0;
  double d2 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;

  void validate() const;
};

/// End-to-end response times (seconds) of both services.
struct Delays {
  double d1 = 0.0;
  double d2 = 0.0;

  friend bool operator==(const Delays&, const Delays&) = default;
};

struct LoadPair {
  double l1 = 0.0;
  double l2 = 0.0;

  friend bool operator==(const LoadPair&, const LoadPair&) = default;
};

/// Discretized action space: every component takes `levels` equally spaced
/// values in [0, 1]; actions are ordered lexicographically in (p11, p21, b1, b2).
class ActionGrid {
 public:
  explicit ActionGrid(int levels);

  int levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return actions_.size(); }
  const Action& operator[](ActionIndex i) const { return actions_[i]; }
  const Action& at(ActionIndex i) const { return actions_.at(i); }
  const std::vector<Action>& actions() const noexcept { return actions_; }
  auto begin() const noexcept { return actions_.begin(); }
  auto end() const noexcept { return actions_.end(); }

  /// Value of grid level k, k / (levels - 1).
  double level_value(int k) const;
  /// Index of the action with the given per-dimension levels.
  ActionIndex index_of(std::array<int, 4> level_indices) const;
  std::array<int, 4> level_indices(ActionIndex i) const;
  /// Nearest grid action (per dimension rounding).
  ActionIndex nearest(const Action& a) const;

 private:
  int levels_;
  std::vector<Action> actions_;
};

ActionGrid build_action_grid(int levels);

/// Admitted request rate l * (1 - b).
double carried_load(double offered, double blocking);

enum class ObjectiveKind { MO1, MO2, MO3 };

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(std::string_view name);
/// Scenario number used in result tables (MO1 -> 1, ...).
int scenario_id(ObjectiveKind kind);

/// Delay bounds, utility weights and reward shape parameters.
struct ManagementObjective {
  ObjectiveKind kind = ObjectiveKind::MO1;
  std::array<double, 2> delay_bounds{0.1, 0.1};      // seconds
  std::array<double, 2> utility_weights{1.0, 5.0};   // used by MO2
  double starvation_threshold = 5.0;                 // requests/second, MO3
  double delay_steepness = 50.0;                     // 1/seconds
  double load_steepness = 1.0;                       // seconds/request

  static ManagementObjective defaults(ObjectiveKind kind);
  void validate() const;
};

/// One row of a trace or evaluation run.
struct EpisodeRecord {
  std::size_t t = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  Action action;
  double d1 = 0.0;
  double d2 = 0.0;
  double lc1 = 0.0;
  double lc2 = 0.0;
  std::optional<double> reward;
  std::optional<double> optimal_reward;
};

}  // namespace meshrl
