#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "qnopt/linalg.hpp"

namespace qnopt {

struct Evaluation {
  real value;
  Vector gradient;
};

struct KnownMinimum {
  Vector x;
  real f;
};

/// Objective with value and gradient. Evaluation is pure; the only state is
/// the pair of call counters, each advanced by exactly one per call
/// (evaluate() advances both).
class Problem {
 public:
  virtual ~Problem() = default;

  std::size_t dim() const { return dim_; }
  virtual std::string name() const = 0;
  const std::optional<KnownMinimum>& known_minimum() const { return known_minimum_; }

  real value(const Vector& x);
  Vector gradient(const Vector& x);
  Evaluation evaluate(const Vector& x);

  std::size_t n_fev() const { return n_fev_; }
  std::size_t n_gev() const { return n_gev_; }
  void reset_counters() { n_fev_ = n_gev_ = 0; }

 protected:
  explicit Problem(std::size_t dim) : dim_(dim) {}

  virtual real compute_value(const Vector& x) const = 0;
  virtual Vector compute_gradient(const Vector& x) const = 0;
  virtual Evaluation compute_both(const Vector& x) const { return {compute_value(x), compute_gradient(x)}; }

  void set_known_minimum(KnownMinimum m) { known_minimum_ = std::move(m); }

 private:
  void check_input(const Vector& x) const;

  std::size_t dim_;
  std::size_t n_fev_ = 0;
  std::size_t n_gev_ = 0;
  std::optional<KnownMinimum> known_minimum_;
};

/// Chained Rosenbrock: sum_{i<n-1} 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2.
/// Minimum 0 at the all-ones vector.
class Rosenbrock final : public Problem {
 public:
  explicit Rosenbrock(std::size_t n);
  std::string name() const override { return "rosenbrock"; }

 protected:
  real compute_value(const Vector& x) const override;
  Vector compute_gradient(const Vector& x) const override;
};

/// f(x, y) = x^2 + y^2 + xy.
class QuadraticXY final : public Problem {
 public:
  QuadraticXY();
  std::string name() const override { return "quadratic-xy"; }

 protected:
  real compute_value(const Vector& x) const override;
  Vector compute_gradient(const Vector& x) const override;
};

Rosenbrock rosenbrock(std::size_t n);
QuadraticXY quadratic_xy();

/// max_i |central_diff_i - grad_i| / (1 + |grad_i|), step h along each axis.
real grad_check(Problem& p, const Vector& x, real h);

}  // namespace qnopt
