#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "qnopt/testfns.hpp"

namespace qnopt {

struct LineSearchConfig {
  real c1 = real(1e-4);  // sufficient decrease (Armijo)
  real c2 = real(0.9);   // curvature
  real rho = real(0.5);  // backtracking shrink factor
  real alpha_init = 1;   // first backtracking trial
  std::size_t max_trials = 50;
  /// Two-sided curvature test |phi'(a)| <= c2 |phi'(0)|; false accepts the
  /// one-sided phi'(a) >= c2 phi'(0).
  bool strong = true;

  void validate() const;
};

enum class LineSearchStatus { Converged, MaxTrials, NonDescent };

const char* to_string(LineSearchStatus s);

/// One evaluation of phi(alpha) = f(x + alpha p). The slope is absent for
/// trials that only evaluated the function (backtracking).
struct PhiSample {
  real alpha;
  real phi;
  std::optional<real> slope;
};

/// Oracle for phi and phi' at a trial step.
using PhiOracle = std::function<PhiSample(real alpha)>;
/// Oracle for phi alone.
using PhiValueOracle = std::function<real(real alpha)>;

struct ScalarSearchResult {
  LineSearchStatus status = LineSearchStatus::MaxTrials;
  real alpha = 0;
  real phi = 0;
  std::optional<real> slope;
  std::vector<PhiSample> trials;
};

bool armijo_holds(real phi0, real slope0, real alpha, real phi_alpha, real c1);
bool curvature_holds(real slope0, real slope_alpha, real c2, bool strong);

/// Moré-Thuente search (MINPACK-2 dcsrch/dcstep): safeguarded cubic and
/// quadratic steps inside a bracket that is extended by extrapolation until
/// a minimizer is enclosed. Converges on the strong Wolfe conditions.
ScalarSearchResult more_thuente(const PhiOracle& phi, real phi0, real slope0, real alpha_init,
                                const LineSearchConfig& cfg);

/// Bracket-then-zoom search: doubling until the bracket contains an
/// acceptable point, then cubic/quadratic interpolation with bisection when
/// the interpolant leaves the safe part of the bracket.
ScalarSearchResult bracket_zoom(const PhiOracle& phi, real phi0, real slope0, real alpha_init,
                                const LineSearchConfig& cfg);

/// Wolfe search: Moré-Thuente first, bracket-zoom if that fails to converge.
/// With cfg.strong == false only bracket-zoom is used, testing the one-sided
/// curvature condition.
ScalarSearchResult strong_wolfe(const PhiOracle& phi, real phi0, real slope0, real alpha_init,
                                const LineSearchConfig& cfg);

/// Armijo backtracking: alpha = alpha_init * rho^j for the smallest j that
/// gives sufficient decrease.
ScalarSearchResult backtracking(const PhiValueOracle& phi, real phi0, real slope0, const LineSearchConfig& cfg);

/// Result of a search carried out on a Problem along x + alpha p.
struct LineSearchOutcome {
  LineSearchStatus status = LineSearchStatus::MaxTrials;
  real alpha = 0;
  Vector x_new;
  real f_new = 0;
  Vector g_new;
  std::size_t n_fev = 0;
  std::size_t n_gev = 0;
  /// True when the search failed to converge and the best Armijo trial seen
  /// was returned instead.
  bool best_trial_fallback = false;
  std::vector<PhiSample> trials;
};

LineSearchOutcome wolfe_search(Problem& problem, const Vector& x, real f, const Vector& g, const Vector& p,
                               real alpha_init, const LineSearchConfig& cfg);

LineSearchOutcome backtracking_search(Problem& problem, const Vector& x, real f, const Vector& g, const Vector& p,
                                      const LineSearchConfig& cfg);

}  // namespace qnopt
