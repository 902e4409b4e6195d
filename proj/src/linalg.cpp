#include "qnopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qnopt {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

Vector::Vector(std::size_t n, real fill) : data_(n, fill) {}
Vector::Vector(std::initializer_list<real> values) : data_(values) {}
Vector::Vector(std::vector<real> values) : data_(std::move(values)) {}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(size(), other.size(), "Vector::operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(size(), other.size(), "Vector::operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(real scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator-(Vector a) { return a *= real{-1}; }
Vector operator*(real scale, Vector v) { return v *= scale; }

real dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  real sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

real norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

real norm_inf(const Vector& v) {
  real m = 0;
  for (real x : v) m = std::max(m, std::abs(x));
  return m;
}

void axpy(real a, const Vector& x, Vector& y) {
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](real x) { return std::isfinite(x); });
}

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, real{0}) {}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n, real scale) {
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, scale);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_rows(const std::vector<std::vector<real>>& rows) {
  SymmetricMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_same_size(rows[i].size(), rows.size(), "SymmetricMatrix::from_rows");
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

SymmetricMatrix& SymmetricMatrix::operator*=(real scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  require_same_size(n_, other.n_, "SymmetricMatrix::operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

real SymmetricMatrix::max_abs() const {
  real m = 0;
  for (real v : data_) m = std::max(m, std::abs(v));
  return m;
}

real SymmetricMatrix::max_diagonal() const {
  real m = 0;
  for (std::size_t i = 0; i < n_; ++i) m = std::max(m, (*this)(i, i));
  return m;
}

real SymmetricMatrix::frobenius_norm() const {
  real sum = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const real v = (*this)(i, j);
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

bool SymmetricMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](real x) { return std::isfinite(x); });
}

Vector sym_matvec(const SymmetricMatrix& a, const Vector& v) {
  require_same_size(a.dim(), v.size(), "sym_matvec");
  const std::size_t n = a.dim();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    real sum = 0;
    for (std::size_t j = 0; j < n; ++j) sum += a(i, j) * v[j];
    out[i] = sum;
  }
  return out;
}

real quad_form(const SymmetricMatrix& a, const Vector& v) { return dot(v, sym_matvec(a, v)); }

SymmetricMatrix rank1_sym_update(SymmetricMatrix a, real c, const Vector& u) {
  rank1_sym_update_inplace(a, c, u);
  return a;
}

void rank1_sym_update_inplace(SymmetricMatrix& a, real c, const Vector& u) {
  require_same_size(a.dim(), u.size(), "rank1_sym_update");
  if (c == 0) return;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const real cu = c * u[i];
    for (std::size_t j = 0; j <= i; ++j) a.add(i, j, cu * u[j]);
  }
}

void rank2_sym_update_inplace(SymmetricMatrix& a, real c, const Vector& u, const Vector& v) {
  require_same_size(a.dim(), u.size(), "rank2_sym_update");
  require_same_size(a.dim(), v.size(), "rank2_sym_update");
  if (c == 0) return;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) a.add(i, j, c * (u[i] * v[j] + v[i] * u[j]));
  }
}

CholeskyFactor::CholeskyFactor(std::size_t n) : n_(n), data_(n * (n + 1) / 2, real{0}) {}

Vector CholeskyFactor::solve(const Vector& b) const {
  require_same_size(n_, b.size(), "CholeskyFactor::solve");
  Vector z(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    real sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= (*this)(i, k) * z[k];
    z[i] = sum / (*this)(i, i);
  }
  Vector x(n_);
  for (std::size_t ii = n_; ii-- > 0;) {
    real sum = z[ii];
    for (std::size_t k = ii + 1; k < n_; ++k) sum -= (*this)(k, ii) * x[k];
    x[ii] = sum / (*this)(ii, ii);
  }
  return x;
}

SymmetricMatrix CholeskyFactor::reconstruct() const {
  SymmetricMatrix a(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      real sum = 0;
      for (std::size_t k = 0; k <= j; ++k) sum += (*this)(i, k) * (*this)(j, k);
      a.set(i, j, sum);
    }
  }
  return a;
}

std::optional<CholeskyFactor> spd_factor(const SymmetricMatrix& a) {
  const std::size_t n = a.dim();
  const real tol = real(1e-14) * a.max_diagonal();
  CholeskyFactor l(n);
  for (std::size_t j = 0; j < n; ++j) {
    real pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > tol) || !std::isfinite(pivot)) return std::nullopt;
    const real ljj = std::sqrt(pivot);
    l.at(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      real sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l.at(i, j) = sum / ljj;
    }
  }
  return l;
}

std::string to_string(const Vector& v) {
  std::string out = "[";
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", static_cast<double>(v[i]));
    if (i) out += ", ";
    out += buf;
  }
  return out + "]";
}

}  // namespace qnopt
