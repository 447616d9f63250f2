#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "meshrl/types.hpp"

namespace meshrl {

enum class LoadKind { Random, Sinusoidal };

/// Offered-load pattern for both services. Random patterns redraw every
/// step from `random_levels`; sinusoidal patterns follow
/// 12.5 + 7.5 sin(2 pi t / period + phase_i).
struct LoadPattern {
  LoadKind kind = LoadKind::Random;
  std::vector<double> random_levels{5.0, 10.0, 15.0, 20.0};
  double period = 100.0;  // steps
  std::array<double, 2> phase{0.0, std::numbers::pi / 2.0};
  std::uint64_t seed = 0;

  static LoadPattern random(std::uint64_t seed);
  static LoadPattern sinusoidal(double period = 100.0,
                                std::array<double, 2> phase = {0.0, std::numbers::pi / 2.0});

  void validate() const;
  /// Largest load the pattern can produce.
  double max_load() const;
};

inline constexpr double kSineMean = 12.5;
inline constexpr double kSineAmplitude = 7.5;

/// Load of `service` (0-based) at `step`; a pure function of (seed, service, step).
double random_load(const LoadPattern& pattern, std::size_t service, std::size_t step);
double sinusoidal_load(const LoadPattern& pattern, std::size_t service, std::size_t step);
/// Dispatches on the pattern kind.
double offered_load(const LoadPattern& pattern, std::size_t service, std::size_t step);
LoadPair offered_loads(const LoadPattern& pattern, std::size_t step);

const char* to_string(LoadKind kind);

}  // namespace meshrl
