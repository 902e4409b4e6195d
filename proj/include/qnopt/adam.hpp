#pragma once

#include <cstddef>

#include "qnopt/linalg.hpp"

namespace qnopt {

struct AdamConfig {
  real lr = real(1e-3);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real eps = real(1e-8);
  /// Step-wise exponential decay: the rate is multiplied by decay_factor
  /// after every decay_every steps. 1 disables the schedule.
  real decay_factor = 1;
  std::size_t decay_every = 1000;

  void validate() const;
  /// Learning rate used by step t (t >= 1).
  real lr_at(std::size_t t) const;
};

struct AdamState {
  Vector m;
  Vector v;
  std::size_t t = 0;

  explicit AdamState(std::size_t n) : m(n), v(n) {}
};

/// One bias-corrected Adam step, x <- x - lr m̂ / (sqrt(v̂) + eps).
/// Advances state.t before use, so the first call runs with t = 1.
void adam_step(AdamState& state, Vector& x, const Vector& g, const AdamConfig& cfg);

}  // namespace qnopt
