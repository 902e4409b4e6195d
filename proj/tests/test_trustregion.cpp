#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qnopt/trustregion.hpp"

using namespace qnopt;

TEST_CASE("config validation") {
  TrustRegionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eta_accept = real(0.5);
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.grow = real(0.5);
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("dogleg examples") {
  const auto i2 = SymmetricMatrix::identity(2);
  const auto zero = dogleg(Vector{0, 0}, i2, 1);
  CHECK(zero.p == Vector{0, 0});
  CHECK(zero.predicted_reduction == 0);

  const auto inner = dogleg(Vector{3, 3}, i2, 10);
  CHECK(inner.p == Vector{-3, -3});
  CHECK_FALSE(inner.on_boundary);

  const auto edge = dogleg(Vector{3, 3}, i2, 1);
  CHECK(std::abs(edge.p[0] + 1 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(edge.p[1] + 1 / std::sqrt(2.0)) <= 1e-12);
  CHECK(edge.on_boundary);
}

TEST_CASE("dogleg on the curved segment and with an indefinite B") {
  const auto b = SymmetricMatrix::from_rows({{10, 0}, {0, 1}});
  const Vector g{10, 1};
  // Newton step (-1, -1) has norm sqrt(2); Cauchy point is shorter.
  const auto sol = dogleg(g, b, real(1.2));
  CHECK(norm2(sol.p) == doctest::Approx(1.2));
  CHECK(sol.on_boundary);
  CHECK(sol.predicted_reduction > 0);

  const auto indefinite = SymmetricMatrix::from_rows({{1, 2}, {2, 1}});
  const auto c = dogleg(Vector{1, 0}, indefinite, 1);
  CHECK(c.cauchy_fallback);
  CHECK(norm2(c.p) <= 1 + 1e-12);
  CHECK(c.predicted_reduction > 0);
}

TEST_CASE("random subproblems respect the radius and the Cauchy decrease bound") {
  SplitMix64 rng(101);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + t % 6;
    const SymmetricMatrix b = t % 7 == 0 ? SymmetricMatrix::from_rows({{1}}) : oracle::random_spd(rng, n);
    const std::size_t m = b.dim();
    const Vector g = oracle::random_vector(rng, m, -3, 3);
    const real delta = static_cast<real>(rng.uniform(0.01, 3));
    const auto sol = dogleg(g, b, delta);
    CHECK(norm2(sol.p) <= delta + 1e-12);
    const real gn = norm2(g);
    CHECK(sol.predicted_reduction >= 0.5 * gn * std::min(delta, gn / b.frobenius_norm()) * (1 - 1e-12));
  }
}

TEST_CASE("tr_step on a quadratic with the exact Hessian") {
  QuadraticXY q;
  const auto hess = SymmetricMatrix::from_rows({{2, 1}, {1, 2}});
  const Vector x{1, 1};
  const auto st = tr_step(x, 3, Vector{3, 3}, hess, 10, q, TrustRegionConfig{});
  CHECK(st.accepted);
  CHECK(st.ratio == doctest::Approx(1));
  CHECK(st.x_new[0] == doctest::Approx(0).epsilon(1e-15));
  CHECK(st.delta_new >= 10);
}

TEST_CASE("tr_step rejects an uphill step and shrinks the radius") {
  QuadraticXY q;
  const Vector x{1, 1};
  const auto st = tr_step(x, 3, Vector{3, 3}, SymmetricMatrix::identity(2), 10, q, TrustRegionConfig{});
  CHECK(st.sub.p == Vector{-3, -3});
  CHECK_FALSE(st.accepted);
  CHECK(st.ratio < 0);
  CHECK(st.x_new == x);
  CHECK(st.f_new == 3);
  CHECK(st.delta_new == 2.5);
}

TEST_CASE("tr_step grows the radius only for boundary steps") {
  QuadraticXY q;
  const auto hess = SymmetricMatrix::from_rows({{2, 1}, {1, 2}});
  const auto st = tr_step(Vector{1, 1}, 3, Vector{3, 3}, hess, real(0.5), q, TrustRegionConfig{});
  CHECK(st.accepted);
  CHECK(st.sub.on_boundary);
  CHECK(st.delta_new == 1);
}
