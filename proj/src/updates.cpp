#include "qnopt/updates.hpp"

#include <algorithm>
#include <cmath>

namespace qnopt {

bool curvature_too_small(const Vector& s, const Vector& y) {
  const real ys = dot(y, s);
  return !(ys > real(1e-14) * norm2(y) * norm2(s));
}

UpdateOutcome bfgs_inverse_update(SymmetricMatrix& h, const Vector& s, const Vector& y) {
  if (curvature_too_small(s, y)) return UpdateOutcome::Skipped;
  const real ys = dot(y, s);
  const Vector hy = sym_matvec(h, y);
  const real yhy = dot(y, hy);
  const real ss_coeff = (ys + yhy) / (ys * ys);
  for (std::size_t i = 0; i < h.dim(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      h.add(i, j, ss_coeff * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / ys);
    }
  }
  return UpdateOutcome::Applied;
}

UpdateOutcome bfgs_direct_update(SymmetricMatrix& b, const Vector& s, const Vector& y) {
  if (curvature_too_small(s, y)) return UpdateOutcome::Skipped;
  const Vector bs = sym_matvec(b, s);
  const real sbs = dot(s, bs);
  if (!(sbs > 0)) return UpdateOutcome::Skipped;
  rank1_sym_update_inplace(b, -1 / sbs, bs);
  rank1_sym_update_inplace(b, 1 / dot(y, s), y);
  return UpdateOutcome::Applied;
}

real phi_from_theta(real theta, real h, real b) { return (1 - theta) / (1 + (h * b - 1) * theta); }

ScalingQuantities ScalingQuantities::with_forced(real forced_theta, real forced_tau) const {
  ScalingQuantities q = *this;
  q.theta = forced_theta;
  q.tau = forced_tau;
  q.phi = phi_from_theta(forced_theta, h, b);
  q.degenerate = false;
  return q;
}

ScalingQuantities broyden_scaling_chain(real ys, real sBs, real yHy, std::size_t n) {
  ScalingQuantities q;
  q.ys = ys;
  q.sBs = sBs;
  q.yHy = yHy;
  q.b = sBs / ys;
  q.h = yHy / ys;
  q.a = q.b * q.h - 1;
  q.rho_plus = std::min(real(1), 1 / q.b);
  if (q.a <= real(1e-12)) {
    q.degenerate = true;
    q.theta = 0;
    q.tau = 1;
    q.phi = 1;
    q.sigma = 1;
    q.sigma_pow = 1;
    return q;
  }
  q.c = std::sqrt(q.a / (1 + q.a));
  q.rho_minus = std::min(real(1), q.h * (1 - q.c));
  q.theta_minus = (q.rho_minus - 1) / q.a;
  q.theta_plus = 1 / q.rho_minus;
  q.theta = std::max(q.theta_minus, std::min(q.theta_plus, (1 - q.b) / q.b));
  q.sigma = 1 + q.theta * q.a;
  q.sigma_pow = n > 1 ? std::pow(std::abs(q.sigma), real(1) / (real(1) - static_cast<real>(n))) : real(1);
  if (q.theta <= 0) {
    q.tau = std::min(q.rho_plus * q.sigma_pow, q.sigma);
  } else {
    q.tau = q.rho_plus * std::min(q.sigma_pow, 1 / q.theta);
  }
  q.phi = phi_from_theta(q.theta, q.h, q.b);
  return q;
}

ScalingQuantities broyden_scaling_chain(const Vector& s, const Vector& y, const SymmetricMatrix& b,
                                        const SymmetricMatrix& h) {
  return broyden_scaling_chain(dot(y, s), quad_form(b, s), quad_form(h, y), s.size());
}

UpdateOutcome ssbroyden_inverse_update(SymmetricMatrix& h, const Vector& s, const Vector& y,
                                       const ScalingQuantities& q) {
  if (curvature_too_small(s, y)) return UpdateOutcome::Skipped;
  const real ys = dot(y, s);
  const Vector hy = sym_matvec(h, y);
  const real yhy = dot(y, hy);
  if (!(yhy > 0) || !(q.tau > 0)) return UpdateOutcome::Skipped;
  const real inv_tau = 1 / q.tau;
  Vector v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = s[i] / ys - hy[i] / yhy;
  const real vv_coeff = q.phi * yhy;
  for (std::size_t i = 0; i < h.dim(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const real bracket = h(i, j) - hy[i] * hy[j] / yhy + vv_coeff * v[i] * v[j];
      h.set(i, j, inv_tau * bracket + s[i] * s[j] / ys);
    }
  }
  return UpdateOutcome::Applied;
}

UpdateOutcome ssbroyden_direct_update(SymmetricMatrix& b, const Vector& s, const Vector& y,
                                      const ScalingQuantities& q) {
  if (curvature_too_small(s, y)) return UpdateOutcome::Skipped;
  const real ys = dot(y, s);
  const Vector bs = sym_matvec(b, s);
  const real sbs = dot(s, bs);
  if (!(sbs > 0) || !(q.tau > 0)) return UpdateOutcome::Skipped;
  Vector w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) w[i] = y[i] / ys - bs[i] / sbs;
  const real ww_coeff = q.theta * sbs;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const real bracket = b(i, j) - bs[i] * bs[j] / sbs + ww_coeff * w[i] * w[j];
      b.set(i, j, q.tau * bracket + y[i] * y[j] / ys);
    }
  }
  return UpdateOutcome::Applied;
}

ScalingQuantities ssbfgs_quantities(real ys, real sBs, real yHy) {
  ScalingQuantities q;
  q.ys = ys;
  q.sBs = sBs;
  q.yHy = yHy;
  q.b = sBs / ys;
  q.h = yHy / ys;
  q.a = q.b * q.h - 1;
  q.rho_plus = std::min(real(1), 1 / q.b);
  q.theta = 0;
  q.phi = 1;
  q.tau = q.rho_plus;
  return q;
}

UpdateOutcome ssbfgs_update(SymmetricMatrix& h, const Vector& s, const Vector& y, real sBs) {
  if (curvature_too_small(s, y)) return UpdateOutcome::Skipped;
  const ScalingQuantities q = ssbfgs_quantities(dot(y, s), sBs, quad_form(h, y));
  return ssbroyden_inverse_update(h, s, y, q);
}

Vector powell_damped(const Vector& s, const Vector& y, const Vector& bs) {
  const real sbs = dot(s, bs);
  const real ys = dot(y, s);
  if (ys >= real(0.2) * sbs) return y;
  const real theta = real(0.8) * sbs / (sbs - ys);
  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = theta * y[i] + (1 - theta) * bs[i];
  return out;
}

}  // namespace qnopt
