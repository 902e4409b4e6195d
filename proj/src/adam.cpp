#include "qnopt/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace qnopt {

void AdamConfig::validate() const {
  if (!(lr > 0)) throw std::invalid_argument("adam: learning rate must be positive");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) throw std::invalid_argument("adam: betas must lie in [0, 1)");
  if (!(eps > 0)) throw std::invalid_argument("adam: eps must be positive");
  if (!(decay_factor > 0 && decay_factor <= 1) || decay_every == 0) {
    throw std::invalid_argument("adam: need 0 < decay_factor <= 1 and decay_every >= 1");
  }
}

real AdamConfig::lr_at(std::size_t t) const {
  if (decay_factor == 1 || t == 0) return lr;
  return lr * std::pow(decay_factor, static_cast<real>((t - 1) / decay_every));
}

void adam_step(AdamState& state, Vector& x, const Vector& g, const AdamConfig& cfg) {
  if (x.size() != g.size() || state.m.size() != g.size()) throw DimensionError("adam: size mismatch");
  ++state.t;
  const real t = static_cast<real>(state.t);
  const real bc1 = 1 - std::pow(cfg.beta1, t);
  const real bc2 = 1 - std::pow(cfg.beta2, t);
  const real lr = cfg.lr_at(state.t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1 - cfg.beta1) * g[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1 - cfg.beta2) * g[i] * g[i];
    const real m_hat = state.m[i] / bc1;
    const real v_hat = state.v[i] / bc2;
    x[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace qnopt
