#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qnopt/testfns.hpp"

namespace qnopt {

/// Widths of a scalar-in, scalar-out tanh network, e.g. {1, 16, 16, 1}.
///
/// Parameters are flattened layer by layer. Within a layer the weight matrix
/// (out x in) comes first in row-major order, followed by the bias vector.
struct MlpArchitecture {
  std::vector<std::size_t> sizes;

  void validate() const;
  std::size_t n_layers() const { return sizes.size() - 1; }
  std::size_t n_params() const;
  /// Offset of layer l's weight block; its bias block follows immediately.
  std::size_t weight_offset(std::size_t layer) const;
};

real glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Weights uniform in ±sqrt(6 / (fan_in + fan_out)) drawn from SplitMix64 in
/// parameter order; biases zero.
Vector init_glorot(const MlpArchitecture& arch, std::uint64_t seed);

/// Network output and its first two derivatives with respect to the input.
struct Jet {
  real u;
  real u_x;
  real u_xx;
};

/// Sensitivities of a scalar loss to the entries of a Jet.
struct JetAdjoint {
  real u = 0;
  real u_x = 0;
  real u_xx = 0;
};

/// tanh on hidden layers, identity output. Forward passes propagate the
/// input derivatives (forward mode); backward() is hand-written reverse mode
/// through that propagation, so losses built from u, u_x and u_xx get exact
/// parameter gradients.
class Mlp {
 public:
  explicit Mlp(MlpArchitecture arch);

  const MlpArchitecture& architecture() const { return arch_; }
  std::size_t n_params() const { return n_params_; }

  real forward(const Vector& params, real x) const;
  Jet forward_jet(const Vector& params, real x) const;

  /// Adds d(adj.u*u + adj.u_x*u_x + adj.u_xx*u_xx)/d(params) at input x to grad.
  void backward(const Vector& params, real x, const JetAdjoint& adj, Vector& grad) const;

 private:
  struct Tape;
  void run_forward(const Vector& params, real x, bool with_derivatives, Tape& tape) const;

  MlpArchitecture arch_;
  std::size_t n_params_;
};

/// Least-squares fit of a 1-D target on n equispaced points of [0, 1]:
/// loss = mean_j (u(x_j) - target(x_j))^2.
class RegressionProblem final : public Problem {
 public:
  RegressionProblem(MlpArchitecture arch, std::size_t n_points, std::function<real(real)> target);
  std::string name() const override { return "regression"; }

  const Mlp& network() const { return net_; }
  const std::vector<real>& points() const { return xs_; }

 protected:
  real compute_value(const Vector& params) const override;
  Vector compute_gradient(const Vector& params) const override;
  Evaluation compute_both(const Vector& params) const override;

 private:
  Evaluation loss_grad(const Vector& params, bool want_grad) const;

  Mlp net_;
  std::vector<real> xs_;
  std::vector<real> targets_;
};

struct PoissonConfig {
  MlpArchitecture arch{{1, 16, 16, 1}};
  std::size_t n_colloc = 64;
  /// 0 selects the exact second derivative; h > 0 selects the three-point
  /// central difference (u(x+h) - 2u(x) + u(x-h)) / h^2.
  real fd_h = 0;
  real lambda_pde = 1;
  real lambda_bc = 100;
};

/// -u'' = pi^2 sin(pi x) on (0, 1), u(0) = u(1) = 0, solution sin(pi x).
/// loss = lambda_pde * mean_i r_i^2 + lambda_bc * (u(0)^2 + u(1)^2) with
/// r_i = u''(x_i) + pi^2 sin(pi x_i) on the interior grid x_i = i / (n + 1).
class PoissonPinnLite final : public Problem {
 public:
  explicit PoissonPinnLite(PoissonConfig cfg);
  std::string name() const override { return "poisson-pinnlite"; }

  const PoissonConfig& config() const { return cfg_; }
  const Mlp& network() const { return net_; }
  const std::vector<real>& collocation_points() const { return xs_; }

  /// Per-point PDE residuals for the given parameters.
  std::vector<real> residuals(const Vector& params) const;
  /// ||u - sin(pi x)||_2 / ||sin(pi x)||_2 on n_grid equispaced points of [0, 1].
  real relative_l2_error(const Vector& params, std::size_t n_grid = 201) const;

 protected:
  real compute_value(const Vector& params) const override;
  Vector compute_gradient(const Vector& params) const override;
  Evaluation compute_both(const Vector& params) const override;

 private:
  real second_derivative(const Vector& params, real x) const;
  Evaluation loss_grad(const Vector& params, bool want_grad) const;

  PoissonConfig cfg_;
  Mlp net_;
  std::vector<real> xs_;
  std::vector<real> forcing_;
};

/// Central-difference second derivative of an arbitrary function; used to
/// check the stencil against known closed forms.
real fd_second_derivative(const std::function<real(real)>& u, real x, real h);

RegressionProblem regression_problem(const MlpArchitecture& arch, std::size_t n_points,
                                     std::function<real(real)> target);
PoissonPinnLite poisson_pinnlite(const PoissonConfig& cfg);

}  // namespace qnopt
