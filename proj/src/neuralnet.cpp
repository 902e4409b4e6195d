#include "qnopt/neuralnet.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qnopt/rng.hpp"

namespace qnopt {

namespace {

constexpr real kPi = std::numbers::pi_v<real>;

void require_finite(real v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError(what + " is not finite");
}

std::string at_point(const char* term, real x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s at x=%.17g", term, static_cast<double>(x));
  return buf;
}

}  // namespace

void MlpArchitecture::validate() const {
  if (sizes.size() < 2) throw std::invalid_argument("mlp: need at least input and output widths");
  if (sizes.front() != 1 || sizes.back() != 1) {
    throw std::invalid_argument("mlp: input and output widths must both be 1");
  }
  for (std::size_t w : sizes) {
    if (w == 0) throw std::invalid_argument("mlp: layer widths must be positive");
  }
}

std::size_t MlpArchitecture::n_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l + 1] * sizes[l] + sizes[l + 1];
  return n;
}

std::size_t MlpArchitecture::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += sizes[l + 1] * sizes[l] + sizes[l + 1];
  return off;
}

real glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(real(6) / static_cast<real>(fan_in + fan_out));
}

Vector init_glorot(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  SplitMix64 rng(seed);
  Vector params(arch.n_params());
  for (std::size_t l = 0; l < arch.n_layers(); ++l) {
    const std::size_t in = arch.sizes[l];
    const std::size_t out = arch.sizes[l + 1];
    const double bound = glorot_bound(in, out);
    const std::size_t off = arch.weight_offset(l);
    for (std::size_t k = 0; k < in * out; ++k) params[off + k] = static_cast<real>(rng.uniform(-bound, bound));
  }
  return params;
}

// Per layer l the tape keeps the layer input (a, da, dda) and, for hidden
// layers, the activation t = tanh(z) together with dz and ddz.
struct Mlp::Tape {
  std::vector<std::vector<real>> a, da, dda;
  std::vector<std::vector<real>> t, dz, ddz;
  bool with_derivatives = false;
  Jet out{};
};

Mlp::Mlp(MlpArchitecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  n_params_ = arch_.n_params();
}

void Mlp::run_forward(const Vector& params, real x, bool with_derivatives, Tape& tape) const {
  if (params.size() != n_params_) {
    throw DimensionError("mlp: expected " + std::to_string(n_params_) + " parameters, got " +
                         std::to_string(params.size()));
  }
  const std::size_t n_layers = arch_.n_layers();
  tape.with_derivatives = with_derivatives;
  tape.a.assign(n_layers, {});
  tape.da.assign(n_layers, {});
  tape.dda.assign(n_layers, {});
  tape.t.assign(n_layers, {});
  tape.dz.assign(n_layers, {});
  tape.ddz.assign(n_layers, {});

  std::vector<real> a{x}, da{1}, dda{0};
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = arch_.sizes[l];
    const std::size_t out = arch_.sizes[l + 1];
    const std::size_t w_off = arch_.weight_offset(l);
    const std::size_t b_off = w_off + in * out;
    std::vector<real> z(out), dz(out), ddz(out);
    for (std::size_t i = 0; i < out; ++i) {
      real s = 0, ds = 0, dds = 0;
      for (std::size_t j = 0; j < in; ++j) {
        const real w = params[w_off + i * in + j];
        s += w * a[j];
        if (with_derivatives) {
          ds += w * da[j];
          dds += w * dda[j];
        }
      }
      z[i] = s + params[b_off + i];
      dz[i] = ds;
      ddz[i] = dds;
    }
    tape.a[l] = std::move(a);
    tape.da[l] = std::move(da);
    tape.dda[l] = std::move(dda);

    if (l + 1 == n_layers) {
      tape.out = {z[0], dz[0], ddz[0]};
      break;
    }
    std::vector<real> t(out), dt(out), ddt(out);
    for (std::size_t i = 0; i < out; ++i) {
      t[i] = std::tanh(z[i]);
      if (with_derivatives) {
        const real sech2 = 1 - t[i] * t[i];
        dt[i] = sech2 * dz[i];
        ddt[i] = sech2 * ddz[i] - 2 * t[i] * sech2 * dz[i] * dz[i];
      }
    }
    tape.t[l] = t;
    tape.dz[l] = std::move(dz);
    tape.ddz[l] = std::move(ddz);
    a = std::move(t);
    da = std::move(dt);
    dda = std::move(ddt);
  }
}

real Mlp::forward(const Vector& params, real x) const {
  Tape tape;
  run_forward(params, x, false, tape);
  return tape.out.u;
}

Jet Mlp::forward_jet(const Vector& params, real x) const {
  Tape tape;
  run_forward(params, x, true, tape);
  return tape.out;
}

void Mlp::backward(const Vector& params, real x, const JetAdjoint& adj, Vector& grad) const {
  if (grad.size() != n_params_) throw DimensionError("mlp: gradient buffer has the wrong size");
  const bool derivs = adj.u_x != 0 || adj.u_xx != 0;
  Tape tape;
  run_forward(params, x, derivs, tape);

  const std::size_t n_layers = arch_.n_layers();
  // Adjoints of the current layer's pre-activation (z, dz, ddz).
  std::vector<real> zbar{adj.u}, dzbar{adj.u_x}, ddzbar{adj.u_xx};
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = arch_.sizes[l];
    const std::size_t out = arch_.sizes[l + 1];
    const std::size_t w_off = arch_.weight_offset(l);
    const std::size_t b_off = w_off + in * out;
    const auto& a = tape.a[l];
    const auto& da = tape.da[l];
    const auto& dda = tape.dda[l];

    for (std::size_t i = 0; i < out; ++i) {
      for (std::size_t j = 0; j < in; ++j) {
        real g = zbar[i] * a[j];
        if (derivs) g += dzbar[i] * da[j] + ddzbar[i] * dda[j];
        grad[w_off + i * in + j] += g;
      }
      grad[b_off + i] += zbar[i];
    }
    if (l == 0) break;

    // Back through W: adjoints of this layer's input, i.e. of the previous
    // layer's activations (t, dt, ddt).
    std::vector<real> abar(in, 0), dabar(in, 0), ddabar(in, 0);
    for (std::size_t i = 0; i < out; ++i) {
      for (std::size_t j = 0; j < in; ++j) {
        const real w = params[w_off + i * in + j];
        abar[j] += w * zbar[i];
        if (derivs) {
          dabar[j] += w * dzbar[i];
          ddabar[j] += w * ddzbar[i];
        }
      }
    }

    // Back through tanh of layer l-1:
    //   t = tanh z, dt = s dz, ddt = s ddz - 2 t s dz^2, s = 1 - t^2.
    const auto& t = tape.t[l - 1];
    const auto& dz = tape.dz[l - 1];
    const auto& ddz = tape.ddz[l - 1];
    zbar.assign(in, 0);
    dzbar.assign(in, 0);
    ddzbar.assign(in, 0);
    for (std::size_t j = 0; j < in; ++j) {
      const real s = 1 - t[j] * t[j];
      if (!derivs) {
        zbar[j] = abar[j] * s;
        continue;
      }
      const real d1 = dz[j];
      const real d2 = ddz[j];
      zbar[j] = abar[j] * s + dabar[j] * (-2 * t[j] * s * d1) +
                ddabar[j] * (-2 * t[j] * s * d2 - 2 * s * s * d1 * d1 + 4 * t[j] * t[j] * s * d1 * d1);
      dzbar[j] = dabar[j] * s + ddabar[j] * (-4 * t[j] * s * d1);
      ddzbar[j] = ddabar[j] * s;
    }
  }
}

RegressionProblem::RegressionProblem(MlpArchitecture arch, std::size_t n_points, std::function<real(real)> target)
    : Problem(arch.n_params()), net_(std::move(arch)) {
  if (n_points < 2) throw std::invalid_argument("regression: need at least 2 sample points");
  for (std::size_t j = 0; j < n_points; ++j) {
    const real x = static_cast<real>(j) / static_cast<real>(n_points - 1);
    xs_.push_back(x);
    targets_.push_back(target(x));
  }
}

Evaluation RegressionProblem::loss_grad(const Vector& params, bool want_grad) const {
  const real n = static_cast<real>(xs_.size());
  real loss = 0;
  Vector grad(want_grad ? net_.n_params() : 0);
  for (std::size_t j = 0; j < xs_.size(); ++j) {
    const real err = net_.forward(params, xs_[j]) - targets_[j];
    require_finite(err, at_point("regression residual", xs_[j]));
    loss += err * err;
    if (want_grad) net_.backward(params, xs_[j], JetAdjoint{2 * err / n, 0, 0}, grad);
  }
  loss /= n;
  require_finite(loss, "regression loss");
  return {loss, std::move(grad)};
}

real RegressionProblem::compute_value(const Vector& params) const { return loss_grad(params, false).value; }
Vector RegressionProblem::compute_gradient(const Vector& params) const { return loss_grad(params, true).gradient; }
Evaluation RegressionProblem::compute_both(const Vector& params) const { return loss_grad(params, true); }

PoissonPinnLite::PoissonPinnLite(PoissonConfig cfg)
    : Problem(cfg.arch.n_params()), cfg_(std::move(cfg)), net_(cfg_.arch) {
  if (cfg_.n_colloc < 8) throw std::invalid_argument("poisson-pinnlite: need at least 8 collocation points");
  if (cfg_.fd_h < 0) throw std::invalid_argument("poisson-pinnlite: finite-difference step must be >= 0");
  const real spacing = real(1) / static_cast<real>(cfg_.n_colloc + 1);
  if (cfg_.fd_h >= spacing) {
    throw std::invalid_argument("poisson-pinnlite: finite-difference step must be well below the grid spacing");
  }
  for (std::size_t i = 1; i <= cfg_.n_colloc; ++i) {
    const real x = static_cast<real>(i) * spacing;
    xs_.push_back(x);
    forcing_.push_back(kPi * kPi * std::sin(kPi * x));
  }
}

real PoissonPinnLite::second_derivative(const Vector& params, real x) const {
  if (cfg_.fd_h == 0) return net_.forward_jet(params, x).u_xx;
  const real h = cfg_.fd_h;
  return (net_.forward(params, x + h) - 2 * net_.forward(params, x) + net_.forward(params, x - h)) / (h * h);
}

std::vector<real> PoissonPinnLite::residuals(const Vector& params) const {
  std::vector<real> r(xs_.size());
  for (std::size_t i = 0; i < xs_.size(); ++i) r[i] = second_derivative(params, xs_[i]) + forcing_[i];
  return r;
}

Evaluation PoissonPinnLite::loss_grad(const Vector& params, bool want_grad) const {
  const real n = static_cast<real>(xs_.size());
  Vector grad(want_grad ? net_.n_params() : 0);

  real pde = 0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const real x = xs_[i];
    const real r = second_derivative(params, x) + forcing_[i];
    require_finite(r, at_point("PDE residual", x));
    pde += r * r;
    if (!want_grad || cfg_.lambda_pde == 0) continue;
    const real w = cfg_.lambda_pde * 2 * r / n;
    if (cfg_.fd_h == 0) {
      net_.backward(params, x, JetAdjoint{0, 0, w}, grad);
    } else {
      const real h2 = cfg_.fd_h * cfg_.fd_h;
      net_.backward(params, x + cfg_.fd_h, JetAdjoint{w / h2, 0, 0}, grad);
      net_.backward(params, x, JetAdjoint{-2 * w / h2, 0, 0}, grad);
      net_.backward(params, x - cfg_.fd_h, JetAdjoint{w / h2, 0, 0}, grad);
    }
  }

  real bc = 0;
  for (real xb : {real(0), real(1)}) {
    const real u = net_.forward(params, xb);
    require_finite(u, at_point("boundary value", xb));
    bc += u * u;
    if (want_grad && cfg_.lambda_bc != 0) net_.backward(params, xb, JetAdjoint{cfg_.lambda_bc * 2 * u, 0, 0}, grad);
  }

  const real loss = cfg_.lambda_pde * (pde / n) + cfg_.lambda_bc * bc;
  require_finite(loss, "poisson-pinnlite loss");
  return {loss, std::move(grad)};
}

real PoissonPinnLite::compute_value(const Vector& params) const { return loss_grad(params, false).value; }
Vector PoissonPinnLite::compute_gradient(const Vector& params) const { return loss_grad(params, true).gradient; }
Evaluation PoissonPinnLite::compute_both(const Vector& params) const { return loss_grad(params, true); }

real PoissonPinnLite::relative_l2_error(const Vector& params, std::size_t n_grid) const {
  if (n_grid < 2) throw std::invalid_argument("relative_l2_error: need at least 2 grid points");
  real num = 0, den = 0;
  for (std::size_t k = 0; k < n_grid; ++k) {
    const real x = static_cast<real>(k) / static_cast<real>(n_grid - 1);
    const real exact = std::sin(kPi * x);
    const real diff = net_.forward(params, x) - exact;
    num += diff * diff;
    den += exact * exact;
  }
  return std::sqrt(num / den);
}

real fd_second_derivative(const std::function<real(real)>& u, real x, real h) {
  return (u(x + h) - 2 * u(x) + u(x - h)) / (h * h);
}

RegressionProblem regression_problem(const MlpArchitecture& arch, std::size_t n_points,
                                     std::function<real(real)> target) {
  return RegressionProblem(arch, n_points, std::move(target));
}

PoissonPinnLite poisson_pinnlite(const PoissonConfig& cfg) { return PoissonPinnLite(cfg); }

}  // namespace qnopt
