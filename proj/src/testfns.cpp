#include "qnopt/testfns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnopt {

void Problem::check_input(const Vector& x) const {
  if (x.size() != dim_) {
    throw DimensionError(name() + ": expected " + std::to_string(dim_) + " variables, got " +
                         std::to_string(x.size()));
  }
}

real Problem::value(const Vector& x) {
  check_input(x);
  ++n_fev_;
  return compute_value(x);
}

Vector Problem::gradient(const Vector& x) {
  check_input(x);
  ++n_gev_;
  return compute_gradient(x);
}

Evaluation Problem::evaluate(const Vector& x) {
  check_input(x);
  ++n_fev_;
  ++n_gev_;
  return compute_both(x);
}

Rosenbrock::Rosenbrock(std::size_t n) : Problem(n) {
  if (n < 2) throw std::invalid_argument("rosenbrock: dimension must be at least 2");
  set_known_minimum({Vector(n, real{1}), real{0}});
}

real Rosenbrock::compute_value(const Vector& x) const {
  real f = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const real a = x[i + 1] - x[i] * x[i];
    const real b = x[i] - 1;
    f += 100 * a * a + b * b;
  }
  return f;
}

Vector Rosenbrock::compute_gradient(const Vector& x) const {
  Vector g(x.size());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const real a = x[i + 1] - x[i] * x[i];
    g[i] += -400 * x[i] * a + 2 * (x[i] - 1);
    g[i + 1] += 200 * a;
  }
  return g;
}

QuadraticXY::QuadraticXY() : Problem(2) { set_known_minimum({Vector{0, 0}, real{0}}); }

real QuadraticXY::compute_value(const Vector& x) const { return x[0] * x[0] + x[1] * x[1] + x[0] * x[1]; }

Vector QuadraticXY::compute_gradient(const Vector& x) const { return Vector{2 * x[0] + x[1], 2 * x[1] + x[0]}; }

Rosenbrock rosenbrock(std::size_t n) { return Rosenbrock(n); }
QuadraticXY quadratic_xy() { return QuadraticXY(); }

real grad_check(Problem& p, const Vector& x, real h) {
  if (!(h > 0)) throw std::invalid_argument("grad_check: step must be positive");
  const Vector g = p.gradient(x);
  real worst = 0;
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const real fp = p.value(probe);
    probe[i] = x[i] - h;
    const real fm = p.value(probe);
    probe[i] = x[i];
    const real fd = (fp - fm) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1 + std::abs(g[i])));
  }
  return worst;
}

}  // namespace qnopt
