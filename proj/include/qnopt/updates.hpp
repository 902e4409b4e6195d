#pragma once

#include <cstddef>

#include "qnopt/linalg.hpp"

namespace qnopt {

enum class UpdateOutcome { Applied, Skipped };

/// Curvature yᵀs too small relative to ||y|| ||s|| for a safe update.
bool curvature_too_small(const Vector& s, const Vector& y);

/// Inverse BFGS update
///   H+ = H + (yᵀs + yᵀHy) ssᵀ / (yᵀs)² - (Hy sᵀ + s yᵀH) / yᵀs
/// Skipped (H unchanged) when yᵀs <= 1e-14 ||y|| ||s||.
UpdateOutcome bfgs_inverse_update(SymmetricMatrix& h, const Vector& s, const Vector& y);

/// Direct BFGS update B+ = B - Bs sᵀB / sᵀBs + y yᵀ / yᵀs.
UpdateOutcome bfgs_direct_update(SymmetricMatrix& b, const Vector& s, const Vector& y);

/// Quantities steering one self-scaled Broyden update. Naming follows the
/// usual notation: b = sᵀBs / yᵀs, h = yᵀHy / yᵀs, a = bh - 1 and so on.
struct ScalingQuantities {
  real ys = 0;   // yᵀs
  real sBs = 0;  // sᵀBs
  real yHy = 0;  // yᵀHy
  real b = 0;
  real h = 0;
  real a = 0;
  real c = 0;
  real rho_minus = 0;
  real theta_minus = 0;
  real theta_plus = 0;
  real theta = 0;
  real rho_plus = 0;
  real sigma = 0;
  real sigma_pow = 0;  // |sigma|^(1/(1-N))
  real tau = 1;
  real phi = 1;        // weight of the v vᵀ term in the inverse update
  bool degenerate = false;

  /// Same b, h; overrides theta and tau and recomputes phi from theta.
  ScalingQuantities with_forced(real forced_theta, real forced_tau) const;
};

/// phi = (1 - theta) / (1 + (hb - 1) theta); maps the direct-update family
/// parameter to the inverse-update one (theta = 0 -> phi = 1 is BFGS,
/// theta = 1 -> phi = 0 is DFP).
real phi_from_theta(real theta, real h, real b);

/// Scaling chain from the scalar inputs. n is the number of variables; the
/// exponent 1/(1-n) is undefined for n = 1 and sigma_pow is then set to 1.
/// When a <= 1e-12 the chain would divide by a, so the degenerate branch
/// returns theta = 0, tau = 1 (an unscaled BFGS step).
ScalingQuantities broyden_scaling_chain(real ys, real sBs, real yHy, std::size_t n);

/// Convenience overload computing sᵀBs and yᵀHy from explicit matrices.
ScalingQuantities broyden_scaling_chain(const Vector& s, const Vector& y, const SymmetricMatrix& b,
                                        const SymmetricMatrix& h);

/// Self-scaled Broyden inverse update
///   H+ = (1/tau) [H - Hy yᵀH / yᵀHy + phi yᵀHy v vᵀ] + s sᵀ / yᵀs,
///   v  = s / yᵀs - Hy / yᵀHy.
/// The secant condition H+ y = s holds for every tau > 0 and phi since vᵀy = 0.
UpdateOutcome ssbroyden_inverse_update(SymmetricMatrix& h, const Vector& s, const Vector& y,
                                       const ScalingQuantities& q);

/// Self-scaled Broyden direct update
///   B+ = tau [B - Bs sᵀB / sᵀBs + theta sᵀBs w wᵀ] + y yᵀ / yᵀs,
///   w  = y / yᵀs - Bs / sᵀBs.
UpdateOutcome ssbroyden_direct_update(SymmetricMatrix& b, const Vector& s, const Vector& y,
                                      const ScalingQuantities& q);

/// tau = min(1, 1/b), theta = 0.
ScalingQuantities ssbfgs_quantities(real ys, real sBs, real yHy);

/// Self-scaled BFGS on the inverse approximation; sBs is sᵀBs for the
/// current B (in line-search mode available without B as -alpha sᵀg).
UpdateOutcome ssbfgs_update(SymmetricMatrix& h, const Vector& s, const Vector& y, real sBs);

/// Powell damping: returns y unchanged when yᵀs >= 0.2 sᵀBs, otherwise the
/// blend theta y + (1 - theta) Bs that makes yᵀs = 0.2 sᵀBs.
Vector powell_damped(const Vector& s, const Vector& y, const Vector& bs);

}  // namespace qnopt
