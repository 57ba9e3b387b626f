#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nonholo/mechanics.hpp"

namespace nonholo {

/// splitmix64 stream; deterministic across platforms, unlike the standard
/// library distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next_u64();
  /// uniform in [0, 1)
  double uniform();
  /// uniform in [lo, hi)
  double uniform(double lo, double hi);
  Vec uniform_vec(int n, double lo, double hi);

 private:
  uint64_t state_;
};

using Box = std::vector<std::pair<double, double>>;

/// Low-discrepancy Halton points inside the box (bases 2, 3, 5, ...).
std::vector<Vec> halton_points(const Box& box, int count);

/// Halton points split into (x, y) states: first base_box.size() coordinates
/// are the base point, the rest the fiber vector.
std::vector<State> halton_states(const Box& base_box, const Box& fiber_box, int count);

std::vector<Vec> random_points(Rng& rng, const Box& box, int count);
std::vector<State> random_states(Rng& rng, const Box& base_box, const Box& fiber_box, int count);

}  // namespace nonholo
