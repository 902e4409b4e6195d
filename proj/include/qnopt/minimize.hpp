#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnopt/adam.hpp"
#include "qnopt/lbfgs.hpp"
#include "qnopt/linalg.hpp"
#include "qnopt/linesearch.hpp"
#include "qnopt/testfns.hpp"
#include "qnopt/trace.hpp"
#include "qnopt/trustregion.hpp"
#include "qnopt/updates.hpp"

namespace qnopt {

enum class Method { GD, Adam, BFGS, SSBFGS, SSBroyden, LBFGS };
enum class Globalization { Wolfe, Backtracking, TrustRegion };
enum class NormKind { L2, Linf };
enum class Status { GradTol, FTol, XTol, MaxIters, LineSearchFailure };

/// How the first Wolfe trial is chosen. Interpolated uses
/// min(1, 2.02 (f_k - f_{k-1}) / gᵀp), the usual quasi-Newton choice that
/// falls back to 1 whenever the estimate is not positive.
enum class InitialStep { Interpolated, Unit };

const char* to_string(Method m);
const char* to_string(Globalization g);
const char* to_string(NormKind n);
const char* to_string(Status s);
std::optional<Method> parse_method(std::string_view text);
std::optional<Globalization> parse_globalization(std::string_view text);
std::optional<NormKind> parse_norm(std::string_view text);

bool is_dense_quasi_newton(Method m);

struct ConvergenceCriteria {
  real gtol = real(1e-6);
  NormKind gnorm = NormKind::L2;
  real ftol = 0;  // |f_k - f_{k-1}| <= ftol, disabled at 0
  real xtol = 0;  // ||x_k - x_{k-1}|| <= xtol, disabled at 0
  std::size_t max_iters = 5000;

  void validate() const;
  real norm(const Vector& g) const;
};

/// Snapshot handed to the observer after every iteration. Pointers stay
/// valid only for the duration of the callback.
struct IterationReport {
  std::size_t iter = 0;
  Globalization globalization = Globalization::Wolfe;
  const Vector* x_prev = nullptr;
  const Vector* x = nullptr;
  const Vector* g_prev = nullptr;
  const Vector* g = nullptr;
  real f_prev = 0;
  real f = 0;
  const Vector* p = nullptr;
  real alpha = 0;
  real slope0 = 0;  // g_prevᵀp
  const Vector* s = nullptr;
  /// Gradient difference as consumed by the update (damped in trust-region mode).
  const Vector* y = nullptr;
  TraceEvent event = TraceEvent::Normal;

  // Line search
  LineSearchStatus ls_status = LineSearchStatus::Converged;
  const std::vector<PhiSample>* trials = nullptr;
  real alpha_init = 0;

  // Quasi-Newton state after the update
  bool update_applied = false;
  const SymmetricMatrix* h = nullptr;
  const SymmetricMatrix* b = nullptr;
  std::optional<ScalingQuantities> scaling;
  /// sᵀBs obtained from -alpha sᵀg (line-search mode) and, when the direct
  /// matrix is tracked, from the explicit product. NaN when unavailable.
  real sBs_implicit = 0;
  real sBs_explicit = 0;

  // Trust region
  bool accepted = true;
  real delta = 0;
  real delta_new = 0;
  real ratio = 0;
  const SubproblemSolution* subproblem = nullptr;
};

struct OptimizerConfig {
  Method method = Method::BFGS;
  Globalization globalization = Globalization::Wolfe;
  ConvergenceCriteria criteria;
  LineSearchConfig line_search;
  TrustRegionConfig trust_region;
  AdamConfig adam;
  std::size_t lbfgs_memory = 10;
  LbfgsScaling lbfgs_scaling = LbfgsScaling::Gamma;
  InitialStep initial_step = InitialStep::Interpolated;
  /// SSBroyden only: replace the chain's theta and tau by fixed values.
  std::optional<real> forced_theta;
  std::optional<real> forced_tau;
  /// Line-search mode: also maintain B explicitly (debug cross-check of sᵀBs).
  bool track_direct_hessian = false;
  /// Fill elapsed_s in the trace; off by default so traces are reproducible.
  bool record_wall_time = false;
  std::function<void(const IterationReport&)> observer;

  void validate() const;
};

struct RunResult {
  Vector x;
  real f = 0;
  Status status = Status::MaxIters;
  std::vector<TraceRecord> trace;
  std::size_t iterations = 0;
  std::size_t n_fev = 0;
  std::size_t n_gev = 0;
  std::string message;
};

/// Minimizes problem from x0. Resets the problem's evaluation counters so the
/// reported tallies equal problem.n_fev() / n_gev() afterwards. Throws
/// NumericalError when f or g is not finite at an accepted iterate.
RunResult minimize(Problem& problem, const Vector& x0, const OptimizerConfig& cfg);

}  // namespace qnopt
