#pragma once

// Independent reference implementations and random generators shared by the
// unit and acceptance tests. Nothing here calls into the update code under
// test; matrices are handled as plain row-major arrays.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qnopt/linalg.hpp"
#include "qnopt/rng.hpp"

namespace oracle {

using qnopt::real;
using qnopt::SymmetricMatrix;
using qnopt::Vector;
using Dense = std::vector<std::vector<real>>;

inline Dense to_dense(const SymmetricMatrix& a) {
  Dense d(a.dim(), std::vector<real>(a.dim()));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) d[i][j] = a(i, j);
  return d;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<real>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline std::vector<real> matvec(const Dense& a, const Vector& v) {
  std::vector<real> out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

inline real inner(const Vector& a, const Vector& b) {
  real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// DFP inverse update H + s sᵀ / yᵀs - H y yᵀ H / yᵀH y.
inline Dense dfp_inverse(const SymmetricMatrix& h, const Vector& s, const Vector& y) {
  Dense d = to_dense(h);
  const std::vector<real> hy = matvec(d, y);
  real ys = inner(y, s);
  real yhy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) yhy += y[i] * hy[i];
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) d[i][j] += s[i] * s[j] / ys - hy[i] * hy[j] / yhy;
  return d;
}

/// BFGS inverse update in product form (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ.
inline Dense bfgs_inverse_product(const SymmetricMatrix& h, const Vector& s, const Vector& y) {
  const std::size_t n = s.size();
  const real rho = 1 / inner(y, s);
  Dense left(n, std::vector<real>(n)), right(n, std::vector<real>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      left[i][j] = (i == j ? 1 : 0) - rho * s[i] * y[j];
      right[i][j] = (i == j ? 1 : 0) - rho * y[i] * s[j];
    }
  Dense out = matmul(matmul(left, to_dense(h)), right);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] += rho * s[i] * s[j];
  return out;
}

inline real max_abs_diff(const SymmetricMatrix& a, const Dense& b) {
  real m = 0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b[i][j]));
  return m;
}

inline real max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b) { return max_abs_diff(a, to_dense(b)); }

inline Vector random_vector(qnopt::SplitMix64& rng, std::size_t n, double lo = -1, double hi = 1) {
  Vector v(n);
  for (auto& x : v) x = static_cast<real>(rng.uniform(lo, hi));
  return v;
}

/// MᵀM + eps I with standard-normal M.
inline SymmetricMatrix random_spd(qnopt::SplitMix64& rng, std::size_t n, real eps = real(0.1)) {
  Dense m(n, std::vector<real>(n));
  for (auto& row : m)
    for (auto& x : row) x = static_cast<real>(rng.normal());
  SymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      real acc = 0;
      for (std::size_t k = 0; k < n; ++k) acc += m[k][i] * m[k][j];
      a.set(i, j, acc + (i == j ? eps : 0));
    }
  return a;
}

/// Random (s, y) with yᵀs > 0, y = A s + noise for a random SPD A.
inline std::pair<Vector, Vector> random_pair(qnopt::SplitMix64& rng, std::size_t n) {
  const SymmetricMatrix a = random_spd(rng, n);
  while (true) {
    Vector s = random_vector(rng, n);
    Vector y = qnopt::sym_matvec(a, s);
    for (auto& v : y) v += static_cast<real>(0.1 * rng.uniform(-1, 1));
    if (inner(y, s) > real(1e-3) * std::sqrt(inner(y, y) * inner(s, s))) return {s, y};
  }
}

}  // namespace oracle
