#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qnopt/updates.hpp"

using namespace qnopt;

TEST_CASE("BFGS inverse update examples") {
  SymmetricMatrix h = SymmetricMatrix::identity(2);
  CHECK(bfgs_inverse_update(h, Vector{1, 0}, Vector{1, 0}) == UpdateOutcome::Applied);
  CHECK(oracle::max_abs_diff(h, SymmetricMatrix::identity(2)) == 0);

  h = SymmetricMatrix::identity(2);
  bfgs_inverse_update(h, Vector{1, 0}, Vector{1, 1});
  CHECK(oracle::max_abs_diff(h, SymmetricMatrix::from_rows({{2, -1}, {-1, 1}})) <= 1e-15);
  CHECK(sym_matvec(h, Vector{1, 1}) == Vector{1, 0});
}

TEST_CASE("DFP member of the family on the same data") {
  SymmetricMatrix h = SymmetricMatrix::identity(2);
  const Vector s{1, 0}, y{1, 1};
  const auto q = broyden_scaling_chain(s, y, SymmetricMatrix::identity(2), h).with_forced(1, 1);
  CHECK(q.phi == 0);
  ssbroyden_inverse_update(h, s, y, q);
  CHECK(oracle::max_abs_diff(h, SymmetricMatrix::from_rows({{1.5, -0.5}, {-0.5, 0.5}})) <= 1e-15);
}

TEST_CASE("BFGS update skips pairs with too little curvature") {
  SymmetricMatrix h = SymmetricMatrix::identity(2);
  CHECK(bfgs_inverse_update(h, Vector{1, 0}, Vector{0, 1}) == UpdateOutcome::Skipped);
  CHECK(bfgs_inverse_update(h, Vector{1, 0}, Vector{-1, 0}) == UpdateOutcome::Skipped);
  CHECK(h == SymmetricMatrix::identity(2));
}

TEST_CASE("BFGS agrees with the product form and keeps H SPD") {
  SplitMix64 rng(41);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 6;
    SymmetricMatrix h = oracle::random_spd(rng, n);
    const auto [s, y] = oracle::random_pair(rng, n);
    const auto ref = oracle::bfgs_inverse_product(h, s, y);
    bfgs_inverse_update(h, s, y);
    CHECK(oracle::max_abs_diff(h, ref) <= 1e-10 * (1 + h.max_abs()));
    CHECK(norm2(sym_matvec(h, y) - s) <= 1e-10 * (1 + norm2(s)) * (1 + h.max_abs()));
    CHECK(spd_factor(h));
  }
}

TEST_CASE("scaling chain: B = H = I reduces to BFGS") {
  const auto q = broyden_scaling_chain(1, 1, 2, 2);
  CHECK(q.b == 1);
  CHECK(q.h == 2);
  CHECK(q.a == 1);
  CHECK(q.c == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(q.rho_minus == doctest::Approx(0.58579).epsilon(1e-5));
  CHECK(q.theta_minus == doctest::Approx(-0.41421).epsilon(1e-5));
  CHECK(q.theta_plus == doctest::Approx(1.70711).epsilon(1e-5));
  CHECK(q.theta == 0);
  CHECK(q.sigma == 1);
  CHECK(q.tau == 1);
  CHECK(q.phi == 1);
  CHECK_FALSE(q.degenerate);
}

TEST_CASE("scaling chain: the reference vector") {
  const auto q = broyden_scaling_chain(Vector{1, 0}, Vector{1, 1}, SymmetricMatrix::identity(2, 2),
                                       SymmetricMatrix::identity(2, 0.5));
  CHECK(q.b == 2);
  CHECK(q.h == 1);
  CHECK(q.a == 1);
  CHECK(q.rho_minus == doctest::Approx(0.29289).epsilon(1e-5));
  CHECK(std::abs(q.theta + 0.5) <= 1e-14);
  CHECK(std::abs(q.sigma - 0.5) <= 1e-14);
  CHECK(std::abs(q.sigma_pow - 2) <= 1e-14);
  CHECK(q.rho_plus == 0.5);
  CHECK(std::abs(q.tau - 0.5) <= 1e-14);
  CHECK(std::abs(q.phi - 3) <= 1e-14);

  SymmetricMatrix h = SymmetricMatrix::identity(2, 0.5);
  REQUIRE(ssbroyden_inverse_update(h, Vector{1, 0}, Vector{1, 1}, q) == UpdateOutcome::Applied);
  CHECK(oracle::max_abs_diff(h, SymmetricMatrix::from_rows({{3, -2}, {-2, 2}})) <= 1e-14);
  CHECK(norm_inf(sym_matvec(h, Vector{1, 1}) - Vector{1, 0}) <= 1e-14);
}

TEST_CASE("scaling chain: degenerate and one-dimensional cases") {
  const auto q = broyden_scaling_chain(Vector{1, 0}, Vector{1, 0}, SymmetricMatrix::identity(2),
                                       SymmetricMatrix::identity(2));
  CHECK(q.degenerate);
  CHECK(q.theta == 0);
  CHECK(q.tau == 1);
  CHECK(q.phi == 1);

  const auto one = broyden_scaling_chain(1, 2, 1, 1);
  CHECK(one.sigma_pow == 1);
  CHECK(std::isfinite(one.tau));
  CHECK(one.tau > 0);
}

TEST_CASE("chain invariants on random data") {
  SplitMix64 rng(43);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + t % 9;
    const SymmetricMatrix b = oracle::random_spd(rng, n);
    const SymmetricMatrix h = oracle::random_spd(rng, n);
    const auto [s, y] = oracle::random_pair(rng, n);
    const auto q = broyden_scaling_chain(s, y, b, h);
    if (q.degenerate) continue;
    CHECK(q.theta >= q.theta_minus);
    CHECK(q.theta <= q.theta_plus);
    CHECK(q.tau > 0);
    CHECK(q.sigma > 0);
    CHECK(std::isfinite(q.phi));
  }
}

TEST_CASE("forced parameters") {
  const auto q = broyden_scaling_chain(1, 2, 1, 2).with_forced(0, 1);
  CHECK(q.theta == 0);
  CHECK(q.tau == 1);
  CHECK(q.phi == 1);
  CHECK(phi_from_theta(1, 3, 2) == 0);
}

TEST_CASE("secant condition holds for every member and scaling") {
  SplitMix64 rng(47);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + t % 7;
    SymmetricMatrix h = oracle::random_spd(rng, n);
    const auto [s, y] = oracle::random_pair(rng, n);
    ScalingQuantities q = broyden_scaling_chain(dot(y, s), real(rng.uniform(0.1, 5)), quad_form(h, y), n);
    if (t % 3 == 1) q = q.with_forced(static_cast<real>(rng.uniform(-0.5, 1)), static_cast<real>(rng.uniform(0.2, 3)));
    REQUIRE(ssbroyden_inverse_update(h, s, y, q) == UpdateOutcome::Applied);
    CHECK(norm2(sym_matvec(h, y) - s) <= 1e-10 * (1 + norm2(s)) * (1 + h.max_abs()));
  }
}

TEST_CASE("direct and inverse updates are inverses of each other") {
  SplitMix64 rng(53);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 5;
    SymmetricMatrix b = oracle::random_spd(rng, n, 1);
    const auto l = spd_factor(b);
    SymmetricMatrix h(n);
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n);
      e[j] = 1;
      const Vector col = l->solve(e);
      for (std::size_t i = j; i < n; ++i) h.set(i, j, col[i]);
    }
    const auto [s, y] = oracle::random_pair(rng, n);
    const auto q = broyden_scaling_chain(s, y, b, h);
    ssbroyden_direct_update(b, s, y, q);
    ssbroyden_inverse_update(h, s, y, q);
    // B+ H+ should be the identity.
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n);
      e[j] = 1;
      const Vector r = sym_matvec(b, sym_matvec(h, e)) - e;
      CHECK(norm_inf(r) <= 1e-8 * (1 + b.max_abs() * h.max_abs()));
    }
    CHECK(norm2(sym_matvec(b, s) - y) <= 1e-9 * (1 + norm2(y)) * (1 + b.max_abs()));
  }
}

TEST_CASE("SSBFGS scaling") {
  const auto q1 = ssbfgs_quantities(1, 1, 3);
  CHECK(q1.tau == 1);
  const auto q2 = ssbfgs_quantities(1, 2, 3);
  CHECK(q2.tau == 0.5);
  CHECK(q2.theta == 0);
  CHECK(q2.phi == 1);

  SymmetricMatrix h = SymmetricMatrix::identity(2);
  SymmetricMatrix ref = SymmetricMatrix::identity(2);
  ssbfgs_update(h, Vector{1, 0}, Vector{1, 1}, 1);
  bfgs_inverse_update(ref, Vector{1, 0}, Vector{1, 1});
  CHECK(oracle::max_abs_diff(h, ref) <= 1e-15);

  SplitMix64 rng(59);
  for (int t = 0; t < 100; ++t) {
    SymmetricMatrix hr = oracle::random_spd(rng, 4);
    const auto [s, y] = oracle::random_pair(rng, 4);
    ssbfgs_update(hr, s, y, real(rng.uniform(0.1, 4)));
    CHECK(norm2(sym_matvec(hr, y) - s) <= 1e-10 * (1 + norm2(s)) * (1 + hr.max_abs()));
  }
}

TEST_CASE("Powell damping") {
  const Vector s{1, 0};
  const Vector bs{2, 0};
  CHECK(powell_damped(s, Vector{1, 5}, bs) == Vector{1, 5});
  const Vector yd = powell_damped(s, Vector{-1, 0}, bs);
  CHECK(dot(yd, s) == doctest::Approx(0.2 * 2));
}
