#include "qnopt/minimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qnopt {

const char* to_string(Method m) {
  switch (m) {
    case Method::GD: return "gd";
    case Method::Adam: return "adam";
    case Method::BFGS: return "bfgs";
    case Method::SSBFGS: return "ssbfgs";
    case Method::SSBroyden: return "ssbroyden";
    case Method::LBFGS: return "lbfgs";
  }
  return "?";
}

const char* to_string(Globalization g) {
  switch (g) {
    case Globalization::Wolfe: return "wolfe";
    case Globalization::Backtracking: return "backtracking";
    case Globalization::TrustRegion: return "trust-region";
  }
  return "?";
}

const char* to_string(NormKind n) { return n == NormKind::L2 ? "l2" : "linf"; }

const char* to_string(Status s) {
  switch (s) {
    case Status::GradTol: return "GradTol";
    case Status::FTol: return "FTol";
    case Status::XTol: return "XTol";
    case Status::MaxIters: return "MaxIters";
    case Status::LineSearchFailure: return "LineSearchFailure";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::GD, Method::Adam, Method::BFGS, Method::SSBFGS, Method::SSBroyden, Method::LBFGS}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Globalization> parse_globalization(std::string_view text) {
  for (Globalization g : {Globalization::Wolfe, Globalization::Backtracking, Globalization::TrustRegion}) {
    if (text == to_string(g)) return g;
  }
  return std::nullopt;
}

std::optional<NormKind> parse_norm(std::string_view text) {
  if (text == "l2") return NormKind::L2;
  if (text == "linf") return NormKind::Linf;
  return std::nullopt;
}

bool is_dense_quasi_newton(Method m) { return m == Method::BFGS || m == Method::SSBFGS || m == Method::SSBroyden; }

void ConvergenceCriteria::validate() const {
  if (!(gtol >= 0 && ftol >= 0 && xtol >= 0)) throw std::invalid_argument("convergence tolerances must be >= 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

real ConvergenceCriteria::norm(const Vector& g) const { return gnorm == NormKind::L2 ? norm2(g) : norm_inf(g); }

void OptimizerConfig::validate() const {
  criteria.validate();
  line_search.validate();
  trust_region.validate();
  adam.validate();
  if (lbfgs_memory == 0) throw std::invalid_argument("L-BFGS memory must be at least 1");
  if (globalization == Globalization::TrustRegion && !is_dense_quasi_newton(method)) {
    throw std::invalid_argument(std::string("trust-region globalization needs a method that keeps B (bfgs, ssbfgs, ssbroyden); got ") +
                                to_string(method));
  }
  if (forced_tau && !(*forced_tau > 0)) throw std::invalid_argument("forced tau must be positive");
}

namespace {

constexpr real kNaN = std::numeric_limits<real>::quiet_NaN();

/// Shared bookkeeping for the three iteration engines.
class Run {
 public:
  Run(Problem& problem, const Vector& x0, const OptimizerConfig& cfg)
      : problem_(problem), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    problem_.reset_counters();
    x = x0;
    Evaluation e = problem_.evaluate(x);
    f = e.value;
    g = std::move(e.gradient);
    require_finite("the starting point");
    record(0, TraceEvent::Normal);
  }

  void require_finite(const std::string& where) const {
    if (!std::isfinite(f)) throw NumericalError("objective is not finite at " + where + " (x = " + to_string(x) + ")");
    if (!all_finite(g)) throw NumericalError("gradient is not finite at " + where + " (x = " + to_string(x) + ")");
  }

  void require_finite_iterate() const { require_finite("iteration " + std::to_string(k)); }

  void record(real alpha, TraceEvent event) {
    TraceRecord r;
    r.iter = k;
    r.f = f;
    r.gnorm_l2 = norm2(g);
    r.gnorm_inf = norm_inf(g);
    r.alpha = alpha;
    r.n_fev = problem_.n_fev();
    r.n_gev = problem_.n_gev();
    if (cfg_.record_wall_time) {
      r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    r.event = event;
    trace_.push_back(r);
  }

  bool grad_converged() const { return cfg_.criteria.norm(g) <= cfg_.criteria.gtol; }

  /// Termination test after an accepted step.
  std::optional<Status> stop_after_step(real f_prev, const Vector& s) const {
    if (grad_converged()) return Status::GradTol;
    if (cfg_.criteria.ftol > 0 && std::abs(f - f_prev) <= cfg_.criteria.ftol) return Status::FTol;
    if (cfg_.criteria.xtol > 0 && norm2(s) <= cfg_.criteria.xtol) return Status::XTol;
    return std::nullopt;
  }

  bool budget_exhausted() const { return k >= cfg_.criteria.max_iters; }

  void notify(const IterationReport& report) const {
    if (cfg_.observer) cfg_.observer(report);
  }

  RunResult finish(Status status, std::string message = {}) {
    RunResult out;
    out.x = x;
    out.f = f;
    out.status = status;
    out.trace = std::move(trace_);
    out.iterations = k;
    out.n_fev = problem_.n_fev();
    out.n_gev = problem_.n_gev();
    out.message = std::move(message);
    return out;
  }

  Problem& problem() { return problem_; }
  const OptimizerConfig& cfg() const { return cfg_; }

  Vector x;
  real f = 0;
  Vector g;
  std::size_t k = 0;

 private:
  Problem& problem_;
  const OptimizerConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
  std::vector<TraceRecord> trace_;
};

/// Applies the configured inverse update to H. Returns the event and fills
/// the scaling quantities used.
TraceEvent update_inverse(Method method, const OptimizerConfig& cfg, SymmetricMatrix& h, const Vector& s,
                          const Vector& y, real sbs, std::optional<ScalingQuantities>& q_out, bool& applied) {
  applied = false;
  if (curvature_too_small(s, y)) return TraceEvent::SkippedUpdate;
  const real ys = dot(y, s);
  const real yhy = quad_form(h, y);
  TraceEvent event = TraceEvent::Normal;
  ScalingQuantities q;
  switch (method) {
    case Method::BFGS:
      q = ssbfgs_quantities(ys, sbs, yhy);
      q.tau = 1;
      applied = bfgs_inverse_update(h, s, y) == UpdateOutcome::Applied;
      q_out = q;
      return applied ? event : TraceEvent::SkippedUpdate;
    case Method::SSBFGS:
      q = ssbfgs_quantities(ys, sbs, yhy);
      break;
    case Method::SSBroyden:
      q = broyden_scaling_chain(ys, sbs, yhy, s.size());
      if (cfg.forced_theta || cfg.forced_tau) {
        q = q.with_forced(cfg.forced_theta.value_or(q.theta), cfg.forced_tau.value_or(q.tau));
      } else if (q.degenerate) {
        event = TraceEvent::DegenerateScaling;
      }
      break;
    default:
      throw std::logic_error("update_inverse: not a dense quasi-Newton method");
  }
  q_out = q;
  applied = ssbroyden_inverse_update(h, s, y, q) == UpdateOutcome::Applied;
  return applied ? event : TraceEvent::SkippedUpdate;
}

real initial_trial(const Run& run, real f_before, real slope) {
  if (run.cfg().initial_step == InitialStep::Unit) return 1;
  const real a = std::min(real(1), real(2.02) * (run.f - f_before) / slope);
  return (a > 0 && std::isfinite(a)) ? a : real(1);
}

RunResult run_line_search(Problem& problem, const Vector& x0, const OptimizerConfig& cfg) {
  Run run(problem, x0, cfg);
  if (run.grad_converged()) return run.finish(Status::GradTol);

  const std::size_t n = x0.size();
  const bool dense = is_dense_quasi_newton(cfg.method);
  SymmetricMatrix h = dense ? SymmetricMatrix::identity(n) : SymmetricMatrix(1);
  std::optional<SymmetricMatrix> b;
  if (dense && cfg.track_direct_hessian) b = SymmetricMatrix::identity(n);
  LbfgsHistory history(cfg.lbfgs_memory);
  // Previous objective used by the interpolated first trial; seeded so the
  // first trial is ||g|| / (-gᵀp) capped at 1.
  real f_before = run.f + norm2(run.g) / 2;

  while (true) {
    if (run.budget_exhausted()) return run.finish(Status::MaxIters);

    TraceEvent event = TraceEvent::Normal;
    Vector p;
    if (dense) {
      p = -sym_matvec(h, run.g);
    } else if (cfg.method == Method::LBFGS) {
      p = lbfgs_direction(history, run.g, cfg.lbfgs_scaling);
    } else {
      p = -run.g;
    }
    real slope = dot(run.g, p);
    if (!(slope < 0)) {
      // The approximation lost positive definiteness; restart from the identity.
      if (dense) h = SymmetricMatrix::identity(n);
      if (b) b = SymmetricMatrix::identity(n);
      history.clear();
      p = -run.g;
      slope = dot(run.g, p);
      event = TraceEvent::Fallback;
      if (!(slope < 0)) return run.finish(Status::GradTol, "zero gradient");
    }

    LineSearchOutcome ls;
    real alpha_init = cfg.line_search.alpha_init;
    if (cfg.globalization == Globalization::Wolfe) {
      alpha_init = cfg.method == Method::GD ? alpha_init : initial_trial(run, f_before, slope);
      ls = wolfe_search(problem, run.x, run.f, run.g, p, alpha_init, cfg.line_search);
    } else {
      ls = backtracking_search(problem, run.x, run.f, run.g, p, cfg.line_search);
    }
    if (ls.status != LineSearchStatus::Converged && !ls.best_trial_fallback) {
      return run.finish(Status::LineSearchFailure, std::string("line search ended with ") + to_string(ls.status) +
                                                       " at iteration " + std::to_string(run.k + 1));
    }
    if (ls.best_trial_fallback) event = TraceEvent::Fallback;

    const Vector x_prev = run.x;
    const Vector g_prev = run.g;
    const real f_prev = run.f;
    const Vector s = ls.alpha * p;
    run.x = std::move(ls.x_new);
    run.f = ls.f_new;
    run.g = std::move(ls.g_new);
    ++run.k;
    run.require_finite_iterate();
    const Vector y = run.g - g_prev;
    f_before = f_prev;

    IterationReport rep;
    rep.iter = run.k;
    rep.globalization = cfg.globalization;
    rep.x_prev = &x_prev;
    rep.x = &run.x;
    rep.g_prev = &g_prev;
    rep.g = &run.g;
    rep.f_prev = f_prev;
    rep.f = run.f;
    rep.p = &p;
    rep.alpha = ls.alpha;
    rep.slope0 = slope;
    rep.s = &s;
    rep.y = &y;
    rep.ls_status = ls.status;
    rep.trials = &ls.trials;
    rep.alpha_init = alpha_init;
    rep.sBs_implicit = kNaN;
    rep.sBs_explicit = kNaN;

    const std::optional<Status> stop = run.stop_after_step(f_prev, s);
    if (!stop) {
      if (dense) {
        // B s = -alpha g, so sᵀBs needs no explicit B.
        const real sbs = -ls.alpha * dot(s, g_prev);
        rep.sBs_implicit = sbs;
        if (b) rep.sBs_explicit = quad_form(*b, s);
        const TraceEvent ev = update_inverse(cfg.method, cfg, h, s, y, sbs, rep.scaling, rep.update_applied);
        if (ev != TraceEvent::Normal) event = ev;
        if (b && rep.update_applied) ssbroyden_direct_update(*b, s, y, *rep.scaling);
      } else if (cfg.method == Method::LBFGS) {
        rep.update_applied = history.push(s, y);
        if (!rep.update_applied) event = TraceEvent::SkippedUpdate;
      }
    }
    if (dense) rep.h = &h;
    if (b) rep.b = &*b;
    rep.event = event;
    run.record(ls.alpha, event);
    run.notify(rep);
    if (stop) return run.finish(*stop);
  }
}

RunResult run_adam(Problem& problem, const Vector& x0, const OptimizerConfig& cfg) {
  Run run(problem, x0, cfg);
  if (run.grad_converged()) return run.finish(Status::GradTol);
  AdamState state(x0.size());
  while (true) {
    if (run.budget_exhausted()) return run.finish(Status::MaxIters);
    const Vector x_prev = run.x;
    const Vector g_prev = run.g;
    const real f_prev = run.f;
    adam_step(state, run.x, run.g, cfg.adam);
    Evaluation e = problem.evaluate(run.x);
    run.f = e.value;
    run.g = std::move(e.gradient);
    ++run.k;
    run.require_finite_iterate();
    const Vector s = run.x - x_prev;
    const Vector y = run.g - g_prev;
    const real lr = cfg.adam.lr_at(state.t);

    IterationReport rep;
    rep.iter = run.k;
    rep.x_prev = &x_prev;
    rep.x = &run.x;
    rep.g_prev = &g_prev;
    rep.g = &run.g;
    rep.f_prev = f_prev;
    rep.f = run.f;
    rep.alpha = lr;
    rep.s = &s;
    rep.y = &y;
    rep.sBs_implicit = kNaN;
    rep.sBs_explicit = kNaN;
    run.record(lr, TraceEvent::Normal);
    run.notify(rep);
    if (auto stop = run.stop_after_step(f_prev, s)) return run.finish(*stop);
  }
}

RunResult run_trust_region(Problem& problem, const Vector& x0, const OptimizerConfig& cfg) {
  Run run(problem, x0, cfg);
  if (run.grad_converged()) return run.finish(Status::GradTol);
  const std::size_t n = x0.size();
  SymmetricMatrix b = SymmetricMatrix::identity(n);
  real delta = cfg.trust_region.delta0;

  while (true) {
    if (run.budget_exhausted()) return run.finish(Status::MaxIters);
    TrustRegionStep step = tr_step(run.x, run.f, run.g, b, delta, problem, cfg.trust_region);
    ++run.k;
    TraceEvent event = step.sub.cauchy_fallback ? TraceEvent::Fallback : TraceEvent::Normal;

    const Vector x_prev = run.x;
    const Vector g_prev = run.g;
    const real f_prev = run.f;
    IterationReport rep;
    rep.iter = run.k;
    rep.globalization = Globalization::TrustRegion;
    rep.x_prev = &x_prev;
    rep.g_prev = &g_prev;
    rep.f_prev = f_prev;
    rep.p = &step.sub.p;
    rep.alpha = delta;
    rep.accepted = step.accepted;
    rep.delta = delta;
    rep.delta_new = step.delta_new;
    rep.ratio = step.ratio;
    rep.subproblem = &step.sub;
    rep.sBs_implicit = kNaN;
    rep.sBs_explicit = kNaN;

    if (!step.accepted) {
      rep.x = &run.x;
      rep.g = &run.g;
      rep.f = run.f;
      rep.b = &b;
      rep.event = TraceEvent::Rejected;
      run.record(delta, TraceEvent::Rejected);
      run.notify(rep);
      delta = step.delta_new;
      if (delta <= std::numeric_limits<real>::epsilon() * (1 + norm2(run.x))) {
        return run.finish(Status::LineSearchFailure,
                          "trust region radius collapsed at iteration " + std::to_string(run.k));
      }
      continue;
    }

    run.x = std::move(step.x_new);
    run.f = step.f_new;
    run.g = problem.gradient(run.x);
    run.require_finite_iterate();
    const Vector s = run.x - x_prev;
    const Vector y_raw = run.g - g_prev;
    Vector y = y_raw;
    const std::optional<Status> stop = run.stop_after_step(f_prev, s);
    if (!stop) {
      const Vector bs = sym_matvec(b, s);
      y = powell_damped(s, y_raw, bs);
      if (curvature_too_small(s, y)) {
        event = TraceEvent::SkippedUpdate;
      } else {
        const real ys = dot(y, s);
        const real sbs = dot(s, bs);
        rep.sBs_explicit = sbs;
        if (cfg.method == Method::BFGS) {
          rep.update_applied = bfgs_direct_update(b, s, y) == UpdateOutcome::Applied;
        } else if (const auto factor = spd_factor(b)) {
          const real yhy = dot(y, factor->solve(y));
          ScalingQuantities q = cfg.method == Method::SSBFGS ? ssbfgs_quantities(ys, sbs, yhy)
                                                              : broyden_scaling_chain(ys, sbs, yhy, n);
          if (cfg.method == Method::SSBroyden && (cfg.forced_theta || cfg.forced_tau)) {
            q = q.with_forced(cfg.forced_theta.value_or(q.theta), cfg.forced_tau.value_or(q.tau));
          } else if (q.degenerate) {
            event = TraceEvent::DegenerateScaling;
          }
          rep.scaling = q;
          rep.update_applied = ssbroyden_direct_update(b, s, y, q) == UpdateOutcome::Applied;
        } else {
          b = SymmetricMatrix::identity(n);
          event = TraceEvent::Fallback;
        }
        if (!rep.update_applied && event == TraceEvent::Normal) event = TraceEvent::SkippedUpdate;
      }
    }
    rep.x = &run.x;
    rep.g = &run.g;
    rep.f = run.f;
    rep.s = &s;
    rep.y = &y;
    rep.b = &b;
    rep.event = event;
    run.record(delta, event);
    run.notify(rep);
    delta = step.delta_new;
    if (stop) return run.finish(*stop);
  }
}

}  // namespace

RunResult minimize(Problem& problem, const Vector& x0, const OptimizerConfig& cfg) {
  if (x0.size() != problem.dim()) {
    throw DimensionError("x0 has " + std::to_string(x0.size()) + " entries but the problem has dimension " +
                         std::to_string(problem.dim()));
  }
  cfg.validate();
  if (cfg.method == Method::Adam) return run_adam(problem, x0, cfg);
  if (cfg.globalization == Globalization::TrustRegion) return run_trust_region(problem, x0, cfg);
  return run_line_search(problem, x0, cfg);
}

}  // namespace qnopt
