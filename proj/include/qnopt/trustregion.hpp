#pragma once

#include "qnopt/linalg.hpp"
#include "qnopt/testfns.hpp"

namespace qnopt {

struct TrustRegionConfig {
  real delta0 = 1;
  real delta_max = 100;
  real eta_accept = real(1e-4);
  real low = real(0.25);   // shrink below this ratio
  real high = real(0.75);  // grow above this ratio (boundary steps only)
  real shrink = real(0.25);
  real grow = 2;

  void validate() const;
};

struct SubproblemSolution {
  Vector p;
  real predicted_reduction = 0;
  bool on_boundary = false;
  /// B was not positive definite; p is the Cauchy point along -g.
  bool cauchy_fallback = false;
};

/// m(0) - m(p) for m(p) = gᵀp + ½ pᵀBp.
real predicted_reduction(const Vector& g, const SymmetricMatrix& b, const Vector& p);

/// Cauchy point: minimizer of the model along -g inside the region.
SubproblemSolution cauchy_point(const Vector& g, const SymmetricMatrix& b, real delta);

/// Dogleg approximation to min m(p) s.t. ||p|| <= delta. Uses the full step
/// -B⁻¹g when it fits, otherwise the point where the path from the Cauchy
/// point toward -B⁻¹g meets the boundary. Falls back to the Cauchy point when
/// B fails the SPD factorization.
SubproblemSolution dogleg(const Vector& g, const SymmetricMatrix& b, real delta);

struct TrustRegionStep {
  bool accepted = false;
  Vector x_new;
  real f_new = 0;
  real delta_new = 0;
  real ratio = 0;
  SubproblemSolution sub;
};

/// One trust-region iteration: solve the subproblem, evaluate f at x + p,
/// accept when actual/predicted >= eta_accept, then adapt the radius.
/// A rejected step returns x unchanged.
TrustRegionStep tr_step(const Vector& x, real f, const Vector& g, const SymmetricMatrix& b, real delta,
                        Problem& problem, const TrustRegionConfig& cfg);

}  // namespace qnopt
