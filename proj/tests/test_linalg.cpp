#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qnopt/linalg.hpp"

using namespace qnopt;

TEST_CASE("dot products") {
  CHECK(dot(Vector{1, 0}, Vector{1, 1}) == 1);
  CHECK(dot(Vector{1, 1}, Vector{1, 1}) == 2);
  CHECK(dot(Vector{0.5, 0.5}, Vector{3, 3}) == 3);
  CHECK_THROWS_AS(dot(Vector{1, 2}, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("dot sums left to right") {
  // (1e16 + 1) - 1e16 in that order loses the 1; a reordered sum would not.
  CHECK(dot(Vector{1e16, 1, -1e16}, Vector{1, 1, 1}) == 0);
}

TEST_CASE("norms and axpy") {
  CHECK(norm2(Vector{3, 4}) == doctest::Approx(5));
  CHECK(norm_inf(Vector{-7, 2}) == 7);
  Vector y{1, 1};
  axpy(2, Vector{1, -1}, y);
  CHECK(y == Vector{3, -1});
  CHECK(all_finite(Vector{1, 2}));
  CHECK_FALSE(all_finite(Vector{1, NAN}));
}

TEST_CASE("sym_matvec examples") {
  CHECK(sym_matvec(SymmetricMatrix::identity(2), Vector{3, -2}) == Vector{3, -2});
  const auto a = SymmetricMatrix::from_rows({{1.5, -0.5}, {-0.5, 0.5}});
  CHECK(sym_matvec(a, Vector{1, 1}) == Vector{1, 0});
  const auto b = SymmetricMatrix::from_rows({{3, -2}, {-2, 2}});
  CHECK(sym_matvec(b, Vector{1, 1}) == Vector{1, 0});
  CHECK_THROWS_AS(sym_matvec(b, Vector{1, 1, 1}), DimensionError);
}

TEST_CASE("identity matvec is exact") {
  SplitMix64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Vector v = oracle::random_vector(rng, 7, -1e6, 1e6);
    CHECK(sym_matvec(SymmetricMatrix::identity(7), v) == v);
  }
}

TEST_CASE("rank1_sym_update examples") {
  const auto i2 = SymmetricMatrix::identity(2);
  CHECK(rank1_sym_update(i2, 1, Vector{1, 0}) == SymmetricMatrix::from_rows({{2, 0}, {0, 1}}));
  CHECK(rank1_sym_update(i2, -0.5, Vector{1, 1}) == SymmetricMatrix::from_rows({{0.5, -0.5}, {-0.5, 0.5}}));
  CHECK(rank1_sym_update(i2, 0, Vector{5, 7}) == i2);
  CHECK_THROWS_AS(rank1_sym_update(i2, 1, Vector{1}), DimensionError);
}

TEST_CASE("symmetry survives 1000 random updates") {
  SplitMix64 rng(11);
  SymmetricMatrix a = SymmetricMatrix::identity(6);
  for (int t = 0; t < 1000; ++t) {
    rank1_sym_update_inplace(a, static_cast<real>(rng.uniform(-0.01, 0.01)), oracle::random_vector(rng, 6));
    rank2_sym_update_inplace(a, static_cast<real>(rng.uniform(-0.01, 0.01)), oracle::random_vector(rng, 6),
                             oracle::random_vector(rng, 6));
  }
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(a(i, j) == a(j, i));
}

TEST_CASE("rank2 update matches the dense definition") {
  SymmetricMatrix a = SymmetricMatrix::identity(2);
  rank2_sym_update_inplace(a, 0.5, Vector{1, 2}, Vector{3, 4});
  CHECK(a(0, 0) == doctest::Approx(4));
  CHECK(a(0, 1) == doctest::Approx(5));
  CHECK(a(1, 1) == doctest::Approx(9));
}

TEST_CASE("spd_factor examples") {
  const auto li = spd_factor(SymmetricMatrix::identity(3));
  REQUIRE(li);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK((*li)(i, j) == (i == j ? 1 : 0));

  const auto l = spd_factor(SymmetricMatrix::from_rows({{4, 2}, {2, 3}}));
  REQUIRE(l);
  CHECK((*l)(0, 0) == doctest::Approx(2).epsilon(1e-15));
  CHECK((*l)(1, 0) == doctest::Approx(1).epsilon(1e-15));
  CHECK((*l)(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK((*l)(0, 1) == 0);

  CHECK_FALSE(spd_factor(SymmetricMatrix::from_rows({{1, 2}, {2, 1}})));
  CHECK_FALSE(spd_factor(SymmetricMatrix::from_rows({{1, 0}, {0, 0}})));
}

TEST_CASE("spd_factor reconstructs random SPD matrices") {
  SplitMix64 rng(5);
  for (std::size_t n : {1u, 2u, 5u, 12u, 30u}) {
    for (int t = 0; t < 20; ++t) {
      const SymmetricMatrix a = oracle::random_spd(rng, n, real(1e-3));
      const auto l = spd_factor(a);
      REQUIRE(l);
      CHECK(oracle::max_abs_diff(l->reconstruct(), a) <= 1e-12 * a.max_abs());
      const Vector b = oracle::random_vector(rng, n);
      const Vector x = l->solve(b);
      const Vector r = sym_matvec(a, x) - b;
      CHECK(norm_inf(r) <= 1e-8 * (1 + norm_inf(b)));
    }
  }
}

TEST_CASE("Frobenius norm and scaling") {
  SymmetricMatrix a = SymmetricMatrix::from_rows({{1, 2}, {2, 3}});
  CHECK(a.frobenius_norm() == doctest::Approx(std::sqrt(1.0 + 4 + 4 + 9)));
  a *= 2;
  CHECK(a(1, 0) == 4);
  CHECK(a.max_diagonal() == 6);
}
