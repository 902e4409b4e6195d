#include "qnopt/trustregion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qnopt {

void TrustRegionConfig::validate() const {
  if (!(delta0 > 0 && delta_max >= delta0)) throw std::invalid_argument("trust region: need 0 < delta0 <= delta_max");
  if (!(eta_accept > 0 && eta_accept <= low && low < high && high < 1)) {
    throw std::invalid_argument("trust region: need 0 < eta_accept <= low < high < 1");
  }
  if (!(shrink > 0 && shrink < 1 && grow > 1)) throw std::invalid_argument("trust region: need 0 < shrink < 1 < grow");
}

real predicted_reduction(const Vector& g, const SymmetricMatrix& b, const Vector& p) {
  return -(dot(g, p) + real(0.5) * quad_form(b, p));
}

SubproblemSolution cauchy_point(const Vector& g, const SymmetricMatrix& b, real delta) {
  SubproblemSolution out;
  const real gnorm = norm2(g);
  if (gnorm == 0) {
    out.p = Vector(g.size());
    return out;
  }
  const real gbg = quad_form(b, g);
  real t = 1;
  if (gbg > 0) t = std::min(gnorm * gnorm * gnorm / (delta * gbg), real(1));
  out.p = (-t * delta / gnorm) * g;
  out.on_boundary = t == 1;
  out.predicted_reduction = predicted_reduction(g, b, out.p);
  return out;
}

SubproblemSolution dogleg(const Vector& g, const SymmetricMatrix& b, real delta) {
  if (!(delta > 0)) throw std::invalid_argument("dogleg: radius must be positive");
  if (g.size() != b.dim()) throw DimensionError("dogleg: gradient and matrix sizes differ");
  SubproblemSolution out;
  if (norm2(g) == 0) {
    out.p = Vector(g.size());
    return out;
  }

  const auto factor = spd_factor(b);
  if (!factor) {
    out = cauchy_point(g, b, delta);
    out.cauchy_fallback = true;
    return out;
  }

  const Vector full = -factor->solve(g);
  if (norm2(full) <= delta) {
    out.p = full;
    out.predicted_reduction = predicted_reduction(g, b, full);
    return out;
  }

  const real gg = dot(g, g);
  const Vector steepest = (-(gg / quad_form(b, g))) * g;
  const real steepest_norm = norm2(steepest);
  if (steepest_norm >= delta) {
    out.p = (-delta / std::sqrt(gg)) * g;
  } else {
    // Solve ||steepest + t (full - steepest)|| = delta for t in [0, 1].
    const Vector d = full - steepest;
    const real a = dot(d, d);
    const real bq = 2 * dot(steepest, d);
    const real c = steepest_norm * steepest_norm - delta * delta;
    const real disc = std::sqrt(std::max(real(0), bq * bq - 4 * a * c));
    // c < 0, so the positive root is computed without cancellation this way.
    const real t = bq >= 0 ? (2 * c) / (-bq - disc) : (-bq + disc) / (2 * a);
    out.p = steepest;
    axpy(t, d, out.p);
    // Rounding can leave the point a hair outside; pull it back radially.
    const real pn = norm2(out.p);
    if (pn > delta) out.p *= delta / pn;
  }
  out.on_boundary = true;
  out.predicted_reduction = predicted_reduction(g, b, out.p);
  return out;
}

TrustRegionStep tr_step(const Vector& x, real f, const Vector& g, const SymmetricMatrix& b, real delta,
                        Problem& problem, const TrustRegionConfig& cfg) {
  TrustRegionStep out;
  out.sub = dogleg(g, b, delta);
  const real pred = out.sub.predicted_reduction;
  if (norm2(g) > 0 && !(pred > 0)) {
    throw NumericalError("trust region: model predicts no decrease for a nonzero gradient");
  }
  Vector trial = x + out.sub.p;
  real f_trial;
  try {
    f_trial = problem.value(trial);
  } catch (const NumericalError&) {
    f_trial = std::numeric_limits<real>::infinity();
  }
  const real actual = f - f_trial;
  out.ratio = pred > 0 ? actual / pred : real(0);
  if (!std::isfinite(f_trial)) out.ratio = -1;

  out.accepted = out.ratio >= cfg.eta_accept;
  if (out.accepted) {
    out.x_new = std::move(trial);
    out.f_new = f_trial;
  } else {
    out.x_new = x;
    out.f_new = f;
  }

  out.delta_new = delta;
  if (out.ratio < cfg.low) {
    out.delta_new = cfg.shrink * delta;
  } else if (out.ratio > cfg.high && out.sub.on_boundary) {
    out.delta_new = std::min(cfg.grow * delta, cfg.delta_max);
  }
  return out;
}

}  // namespace qnopt
