#include "meshrl/loadgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meshrl/rng.hpp"

namespace meshrl {

LoadPattern LoadPattern::random(std::uint64_t seed) {
  LoadPattern p;
  p.kind = LoadKind::Random;
  p.seed = seed;
  return p;
}

LoadPattern LoadPattern::sinusoidal(double period, std::array<double, 2> phase) {
  LoadPattern p;
  p.kind = LoadKind::Sinusoidal;
  p.period = period;
  p.phase = phase;
  return p;
}

void LoadPattern::validate() const {
  if (kind == LoadKind::Sinusoidal && !(period > 0.0))
    throw std::invalid_argument("sinusoidal period must be > 0");
  if (kind == LoadKind::Random) {
    if (random_levels.empty()) throw std::invalid_argument("random_levels must be nonempty");
    for (double v : random_levels)
      if (!(v >= 0.0)) throw std::invalid_argument("random_levels must be nonnegative");
  }
}

double LoadPattern::max_load() const {
  if (kind == LoadKind::Sinusoidal) return kSineMean + kSineAmplitude;
  return *std::max_element(random_levels.begin(), random_levels.end());
}

double random_load(const LoadPattern& pattern, std::size_t service, std::size_t step) {
  if (pattern.kind != LoadKind::Random)
    throw std::invalid_argument("random_load requires a Random pattern");
  if (pattern.random_levels.empty()) throw std::invalid_argument("random_levels is empty");
  const std::uint64_t stream = derive_seed(pattern.seed, "load") + service;
  const auto k = counter_index(pattern.seed, stream, step, pattern.random_levels.size());
  return pattern.random_levels[k];
}

double sinusoidal_load(const LoadPattern& pattern, std::size_t service, std::size_t step) {
  if (pattern.kind != LoadKind::Sinusoidal)
    throw std::invalid_argument("sinusoidal_load requires a Sinusoidal pattern");
  if (service >= kNumServices) throw std::out_of_range("service index out of range");
  const double cycle = std::fmod(static_cast<double>(step), pattern.period);
  const double arg = 2.0 * std::numbers::pi * cycle / pattern.period +
                     pattern.phase[service];
  return kSineMean + kSineAmplitude * std::sin(arg);
}

double offered_load(const LoadPattern& pattern, std::size_t service, std::size_t step) {
  return pattern.kind == LoadKind::Random ? random_load(pattern, service, step)
                                          : sinusoidal_load(pattern, service, step);
}

LoadPair offered_loads(const LoadPattern& pattern, std::size_t step) {
  return {offered_load(pattern, 0, step), offered_load(pattern, 1, step)};
}

const char* to_string(LoadKind kind) {
  return kind == LoadKind::Random ? "random" : "sinusoidal";
}

}  // namespace meshrl
