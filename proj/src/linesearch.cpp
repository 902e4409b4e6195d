#include "qnopt/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qnopt {

void LineSearchConfig::validate() const {
  if (!(c1 > 0 && c1 < c2 && c2 < 1)) throw std::invalid_argument("line search: require 0 < c1 < c2 < 1");
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("line search: require 0 < rho < 1");
  if (!(alpha_init > 0)) throw std::invalid_argument("line search: initial step must be positive");
  if (max_trials == 0) throw std::invalid_argument("line search: max_trials must be positive");
}

const char* to_string(LineSearchStatus s) {
  switch (s) {
    case LineSearchStatus::Converged: return "Converged";
    case LineSearchStatus::MaxTrials: return "MaxTrials";
    case LineSearchStatus::NonDescent: return "NonDescent";
  }
  return "?";
}

bool armijo_holds(real phi0, real slope0, real alpha, real phi_alpha, real c1) {
  return phi_alpha <= phi0 + c1 * alpha * slope0;
}

bool curvature_holds(real slope0, real slope_alpha, real c2, bool strong) {
  return strong ? std::abs(slope_alpha) <= c2 * std::abs(slope0) : slope_alpha >= c2 * slope0;
}

namespace {

constexpr real kStepMin = real(1e-100);
constexpr real kStepMax = real(1e100);
constexpr real kRelativeWidthTol = real(1e-14);

real sign(real v) { return v > 0 ? real(1) : (v < 0 ? real(-1) : real(0)); }

struct Bracket {
  real stx, fx, dx;
  real sty, fy, dy;
  bool brackt;
};

// One safeguarded step of the Moré-Thuente method. Updates the interval
// [stx, sty] and returns the next trial step.
real safeguarded_step(Bracket& b, real stp, real fp, real dp, real stpmin, real stpmax) {
  const real sgnd = sign(dp) * sign(b.dx);
  real stpf;

  if (fp > b.fx) {
    // Higher function value: minimizer bracketed. Take the cubic step if it
    // is closer to stx than the quadratic step, else their average.
    const real theta = 3 * (b.fx - fp) / (stp - b.stx) + b.dx + dp;
    const real s = std::max({std::abs(theta), std::abs(b.dx), std::abs(dp)});
    real gamma = s * std::sqrt((theta / s) * (theta / s) - (b.dx / s) * (dp / s));
    if (stp < b.stx) gamma = -gamma;
    const real p = (gamma - b.dx) + theta;
    const real q = ((gamma - b.dx) + gamma) + dp;
    const real r = p / q;
    const real stpc = b.stx + r * (stp - b.stx);
    const real stpq = b.stx + ((b.dx / ((b.fx - fp) / (stp - b.stx) + b.dx)) / 2) * (stp - b.stx);
    stpf = std::abs(stpc - b.stx) <= std::abs(stpq - b.stx) ? stpc : stpc + (stpq - stpc) / 2;
    b.brackt = true;
  } else if (sgnd < 0) {
    // Lower value, derivatives of opposite sign: bracketed. Cubic step if it
    // is farther from stp than the secant step.
    const real theta = 3 * (b.fx - fp) / (stp - b.stx) + b.dx + dp;
    const real s = std::max({std::abs(theta), std::abs(b.dx), std::abs(dp)});
    real gamma = s * std::sqrt((theta / s) * (theta / s) - (b.dx / s) * (dp / s));
    if (stp > b.stx) gamma = -gamma;
    const real p = (gamma - dp) + theta;
    const real q = ((gamma - dp) + gamma) + b.dx;
    const real r = p / q;
    const real stpc = stp + r * (b.stx - stp);
    const real stpq = stp + (dp / (dp - b.dx)) * (b.stx - stp);
    stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
    b.brackt = true;
  } else if (std::abs(dp) < std::abs(b.dx)) {
    // Lower value, same-sign derivatives, derivative magnitude decreasing.
    const real theta = 3 * (b.fx - fp) / (stp - b.stx) + b.dx + dp;
    const real s = std::max({std::abs(theta), std::abs(b.dx), std::abs(dp)});
    real gamma = s * std::sqrt(std::max(real(0), (theta / s) * (theta / s) - (b.dx / s) * (dp / s)));
    if (stp > b.stx) gamma = -gamma;
    const real p = (gamma - dp) + theta;
    const real q = (gamma + (b.dx - dp)) + gamma;
    const real r = p / q;
    real stpc;
    if (r < 0 && gamma != 0) {
      stpc = stp + r * (b.stx - stp);
    } else if (stp > b.stx) {
      stpc = stpmax;
    } else {
      stpc = stpmin;
    }
    const real stpq = stp + (dp / (dp - b.dx)) * (b.stx - stp);
    if (b.brackt) {
      stpf = std::abs(stpc - stp) < std::abs(stpq - stp) ? stpc : stpq;
      if (stp > b.stx) {
        stpf = std::min(stp + real(0.66) * (b.sty - stp), stpf);
      } else {
        stpf = std::max(stp + real(0.66) * (b.sty - stp), stpf);
      }
    } else {
      stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
      stpf = std::clamp(stpf, stpmin, stpmax);
    }
  } else {
    // Lower value, same-sign derivatives, magnitude not decreasing.
    if (b.brackt) {
      const real theta = 3 * (fp - b.fy) / (b.sty - stp) + b.dy + dp;
      const real s = std::max({std::abs(theta), std::abs(b.dy), std::abs(dp)});
      real gamma = s * std::sqrt((theta / s) * (theta / s) - (b.dy / s) * (dp / s));
      if (stp > b.sty) gamma = -gamma;
      const real p = (gamma - dp) + theta;
      const real q = ((gamma - dp) + gamma) + b.dy;
      const real r = p / q;
      stpf = stp + r * (b.sty - stp);
    } else {
      stpf = stp > b.stx ? stpmax : stpmin;
    }
  }

  if (fp > b.fx) {
    b.sty = stp;
    b.fy = fp;
    b.dy = dp;
  } else {
    if (sgnd < 0) {
      b.sty = b.stx;
      b.fy = b.fx;
      b.dy = b.dx;
    }
    b.stx = stp;
    b.fx = fp;
    b.dx = dp;
  }
  return stpf;
}

PhiSample sample(const PhiOracle& phi, real alpha, std::vector<PhiSample>& log) {
  PhiSample s = phi(alpha);
  s.alpha = alpha;
  log.push_back(s);
  return s;
}

}  // namespace

ScalarSearchResult more_thuente(const PhiOracle& phi, real phi0, real slope0, real alpha_init,
                                const LineSearchConfig& cfg) {
  ScalarSearchResult out;
  if (!(slope0 < 0)) {
    out.status = LineSearchStatus::NonDescent;
    return out;
  }
  const real ftol = cfg.c1;
  const real gtol = cfg.c2;
  const real gtest = ftol * slope0;

  real stp = std::clamp(alpha_init, kStepMin, kStepMax);
  Bracket b{0, phi0, slope0, 0, phi0, slope0, false};
  int stage = 1;
  real width = kStepMax - kStepMin;
  real width1 = width / real(0.5);
  real stmin = 0;
  real stmax = stp + 4 * stp;

  for (std::size_t trial = 0; trial < cfg.max_trials; ++trial) {
    if (!std::isfinite(stp)) break;
    const PhiSample s = sample(phi, stp, out.trials);
    const real f = s.phi;
    const real g = *s.slope;
    if (!std::isfinite(f) || !std::isfinite(g)) break;

    const real ftest = phi0 + stp * gtest;
    if (stage == 1 && f <= ftest && g >= 0) stage = 2;

    if (f <= ftest && std::abs(g) <= gtol * -slope0) {
      out.status = LineSearchStatus::Converged;
      out.alpha = stp;
      out.phi = f;
      out.slope = g;
      return out;
    }
    // Warnings end the search without convergence.
    if (b.brackt && (stp <= stmin || stp >= stmax)) break;
    if (b.brackt && stmax - stmin <= kRelativeWidthTol * stmax) break;
    if (stp == kStepMax && f <= ftest && g <= gtest) break;
    if (stp == kStepMin && (f > ftest || g >= gtest)) break;

    if (stage == 1 && f <= b.fx && f > ftest) {
      // Work with the modified function psi(a) = phi(a) - phi0 - a*gtest.
      Bracket m{b.stx, b.fx - b.stx * gtest, b.dx - gtest, b.sty, b.fy - b.sty * gtest, b.dy - gtest, b.brackt};
      stp = safeguarded_step(m, stp, f - stp * gtest, g - gtest, stmin, stmax);
      b = {m.stx, m.fx + m.stx * gtest, m.dx + gtest, m.sty, m.fy + m.sty * gtest, m.dy + gtest, m.brackt};
    } else {
      stp = safeguarded_step(b, stp, f, g, stmin, stmax);
    }

    if (b.brackt) {
      if (std::abs(b.sty - b.stx) >= real(0.66) * width1) stp = b.stx + real(0.5) * (b.sty - b.stx);
      width1 = width;
      width = std::abs(b.sty - b.stx);
      stmin = std::min(b.stx, b.sty);
      stmax = std::max(b.stx, b.sty);
    } else {
      stmin = stp + real(1.1) * (stp - b.stx);
      stmax = stp + real(4.0) * (stp - b.stx);
    }
    stp = std::clamp(stp, kStepMin, kStepMax);
    if ((b.brackt && (stp <= stmin || stp >= stmax)) || (b.brackt && stmax - stmin <= kRelativeWidthTol * stmax)) {
      stp = b.stx;
    }
  }
  out.status = LineSearchStatus::MaxTrials;
  return out;
}

namespace {

std::optional<real> cubic_minimizer(real a, real fa, real fpa, real b, real fb, real c, real fc) {
  const real C = fpa;
  const real db = b - a;
  const real dc = c - a;
  const real denom = (db * dc) * (db * dc) * (db - dc);
  if (denom == 0) return std::nullopt;
  const real r1 = fb - fa - C * db;
  const real r2 = fc - fa - C * dc;
  real A = dc * dc * r1 - db * db * r2;
  real B = -dc * dc * dc * r1 + db * db * db * r2;
  A /= denom;
  B /= denom;
  const real radical = B * B - 3 * A * C;
  if (radical < 0 || A == 0) return std::nullopt;
  const real xmin = a + (-B + std::sqrt(radical)) / (3 * A);
  if (!std::isfinite(xmin)) return std::nullopt;
  return xmin;
}

std::optional<real> quadratic_minimizer(real a, real fa, real fpa, real b, real fb) {
  const real db = b - a;
  if (db == 0) return std::nullopt;
  const real B = (fb - fa - fpa * db) / (db * db);
  if (B == 0) return std::nullopt;
  const real xmin = a - fpa / (2 * B);
  if (!std::isfinite(xmin)) return std::nullopt;
  return xmin;
}

}  // namespace

ScalarSearchResult bracket_zoom(const PhiOracle& phi, real phi0, real slope0, real alpha_init,
                                const LineSearchConfig& cfg) {
  ScalarSearchResult out;
  if (!(slope0 < 0)) {
    out.status = LineSearchStatus::NonDescent;
    return out;
  }
  const real c1 = cfg.c1;
  const real c2 = cfg.c2;
  auto budget_left = [&] { return out.trials.size() < cfg.max_trials; };
  auto accept = [&](const PhiSample& s) {
    out.status = LineSearchStatus::Converged;
    out.alpha = s.alpha;
    out.phi = s.phi;
    out.slope = s.slope;
    return out;
  };

  auto zoom = [&](real a_lo, real a_hi, real phi_lo, real phi_hi, real dphi_lo) -> ScalarSearchResult {
    constexpr real kCubicCheck = real(0.2);
    constexpr real kQuadCheck = real(0.1);
    real phi_rec = phi0;
    real a_rec = 0;
    for (int i = 0; i <= 10 && budget_left(); ++i) {
      const real dalpha = a_hi - a_lo;
      const real lo = std::min(a_lo, a_hi);
      const real hi = std::max(a_lo, a_hi);
      std::optional<real> a_j;
      if (i > 0) {
        const real cchk = kCubicCheck * dalpha;
        a_j = cubic_minimizer(a_lo, phi_lo, dphi_lo, a_hi, phi_hi, a_rec, phi_rec);
        if (a_j && (*a_j > hi - cchk || *a_j < lo + cchk)) a_j.reset();
      }
      if (!a_j) {
        const real qchk = kQuadCheck * dalpha;
        a_j = quadratic_minimizer(a_lo, phi_lo, dphi_lo, a_hi, phi_hi);
        if (!a_j || *a_j > hi - qchk || *a_j < lo + qchk) a_j = a_lo + real(0.5) * dalpha;
      }
      const PhiSample s = sample(phi, *a_j, out.trials);
      const bool finite = std::isfinite(s.phi) && std::isfinite(*s.slope);
      if (!finite || !armijo_holds(phi0, slope0, s.alpha, s.phi, c1) || s.phi >= phi_lo) {
        phi_rec = phi_hi;
        a_rec = a_hi;
        a_hi = s.alpha;
        phi_hi = finite ? s.phi : std::numeric_limits<real>::infinity();
      } else {
        if (curvature_holds(slope0, *s.slope, c2, cfg.strong)) return accept(s);
        if (*s.slope * (a_hi - a_lo) >= 0) {
          phi_rec = phi_hi;
          a_rec = a_hi;
          a_hi = a_lo;
          phi_hi = phi_lo;
        } else {
          phi_rec = phi_lo;
          a_rec = a_lo;
        }
        a_lo = s.alpha;
        phi_lo = s.phi;
        dphi_lo = *s.slope;
      }
    }
    out.status = LineSearchStatus::MaxTrials;
    return out;
  };

  real alpha0 = 0;
  real alpha1 = std::min(alpha_init, kStepMax);
  real phi_a0 = phi0;
  real dphi_a0 = slope0;
  for (int i = 0; i < 10 && budget_left(); ++i) {
    if (alpha1 == 0 || !std::isfinite(alpha1)) break;
    const PhiSample s = sample(phi, alpha1, out.trials);
    if (!std::isfinite(s.phi) || !std::isfinite(*s.slope)) {
      return zoom(alpha0, alpha1, phi_a0, std::numeric_limits<real>::infinity(), dphi_a0);
    }
    if (!armijo_holds(phi0, slope0, alpha1, s.phi, c1) || (i > 0 && s.phi >= phi_a0)) {
      return zoom(alpha0, alpha1, phi_a0, s.phi, dphi_a0);
    }
    if (curvature_holds(slope0, *s.slope, c2, cfg.strong)) return accept(s);
    if (*s.slope >= 0) return zoom(alpha1, alpha0, s.phi, phi_a0, *s.slope);
    alpha0 = alpha1;
    alpha1 = std::min(2 * alpha1, kStepMax);
    phi_a0 = s.phi;
    dphi_a0 = *s.slope;
  }
  out.status = LineSearchStatus::MaxTrials;
  return out;
}

ScalarSearchResult strong_wolfe(const PhiOracle& phi, real phi0, real slope0, real alpha_init,
                                const LineSearchConfig& cfg) {
  cfg.validate();
  if (!cfg.strong) return bracket_zoom(phi, phi0, slope0, alpha_init, cfg);
  ScalarSearchResult first = more_thuente(phi, phi0, slope0, alpha_init, cfg);
  if (first.status != LineSearchStatus::MaxTrials) return first;
  ScalarSearchResult second = bracket_zoom(phi, phi0, slope0, alpha_init, cfg);
  first.trials.insert(first.trials.end(), second.trials.begin(), second.trials.end());
  second.trials = std::move(first.trials);
  return second;
}

ScalarSearchResult backtracking(const PhiValueOracle& phi, real phi0, real slope0, const LineSearchConfig& cfg) {
  cfg.validate();
  ScalarSearchResult out;
  if (!(slope0 < 0)) {
    out.status = LineSearchStatus::NonDescent;
    return out;
  }
  real alpha = cfg.alpha_init;
  for (std::size_t j = 0; j < cfg.max_trials; ++j) {
    const real value = phi(alpha);
    out.trials.push_back({alpha, value, std::nullopt});
    if (armijo_holds(phi0, slope0, alpha, value, cfg.c1)) {
      out.status = LineSearchStatus::Converged;
      out.alpha = alpha;
      out.phi = value;
      return out;
    }
    alpha *= cfg.rho;
  }
  out.status = LineSearchStatus::MaxTrials;
  return out;
}

namespace {

Vector point_along(const Vector& x, real alpha, const Vector& p) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * p[i];
  return out;
}

}  // namespace

LineSearchOutcome wolfe_search(Problem& problem, const Vector& x, real f, const Vector& g, const Vector& p,
                               real alpha_init, const LineSearchConfig& cfg) {
  struct Evaluated {
    real alpha;
    Vector x;
    real f;
    Vector g;
  };
  std::vector<Evaluated> seen;
  LineSearchOutcome out;

  const PhiOracle oracle = [&](real alpha) {
    Vector xa = point_along(x, alpha, p);
    ++out.n_fev;
    ++out.n_gev;
    Evaluation e{0, Vector()};
    try {
      e = problem.evaluate(xa);
    } catch (const NumericalError&) {
      // A trial that overflows is treated like a failed decrease test.
      e.value = std::numeric_limits<real>::infinity();
      e.gradient = Vector(xa.size(), std::numeric_limits<real>::quiet_NaN());
    }
    const real slope = dot(e.gradient, p);
    seen.push_back({alpha, std::move(xa), e.value, std::move(e.gradient)});
    return PhiSample{alpha, seen.back().f, slope};
  };

  const real slope0 = dot(g, p);
  ScalarSearchResult r = strong_wolfe(oracle, f, slope0, alpha_init, cfg);
  out.status = r.status;
  out.trials = std::move(r.trials);

  const Evaluated* chosen = nullptr;
  if (r.status == LineSearchStatus::Converged) {
    for (auto it = seen.rbegin(); it != seen.rend(); ++it) {
      if (it->alpha == r.alpha) {
        chosen = &*it;
        break;
      }
    }
  } else if (r.status == LineSearchStatus::MaxTrials) {
    for (const auto& e : seen) {
      if (std::isfinite(e.f) && armijo_holds(f, slope0, e.alpha, e.f, cfg.c1) && (!chosen || e.f < chosen->f)) {
        chosen = &e;
      }
    }
    out.best_trial_fallback = chosen != nullptr;
  }
  if (chosen) {
    out.alpha = chosen->alpha;
    out.x_new = chosen->x;
    out.f_new = chosen->f;
    out.g_new = chosen->g;
  }
  return out;
}

LineSearchOutcome backtracking_search(Problem& problem, const Vector& x, real f, const Vector& g, const Vector& p,
                                      const LineSearchConfig& cfg) {
  LineSearchOutcome out;
  const PhiValueOracle oracle = [&](real alpha) {
    ++out.n_fev;
    try {
      return problem.value(point_along(x, alpha, p));
    } catch (const NumericalError&) {
      return std::numeric_limits<real>::infinity();
    }
  };
  ScalarSearchResult r = backtracking(oracle, f, dot(g, p), cfg);
  out.status = r.status;
  out.trials = std::move(r.trials);
  if (r.status == LineSearchStatus::Converged) {
    out.alpha = r.alpha;
    out.x_new = point_along(x, r.alpha, p);
    out.f_new = r.phi;
    out.g_new = problem.gradient(out.x_new);
    ++out.n_gev;
  }
  return out;
}

}  // namespace qnopt
