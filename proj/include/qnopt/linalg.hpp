#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnopt {

#ifdef QNOPT_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

/// Thrown when operands of a linear-algebra kernel disagree in size.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an objective, gradient or iterate stops being finite.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense column vector of reals.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, real fill = 0);
  Vector(std::initializer_list<real> values);
  explicit Vector(std::vector<real> values);

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  real& operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }

  std::span<real> span() { return data_; }
  std::span<const real> span() const { return data_; }
  const std::vector<real>& values() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(real scale);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<real> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator-(Vector a);
Vector operator*(real scale, Vector v);

// All reductions sum left to right so results are bit-reproducible.
real dot(const Vector& a, const Vector& b);
real norm2(const Vector& v);
real norm_inf(const Vector& v);
/// y += a * x
void axpy(real a, const Vector& x, Vector& y);
bool all_finite(const Vector& v);

/// Dense symmetric matrix. Only the lower triangle is stored; reads of the
/// upper triangle mirror it, so A(i, j) == A(j, i) holds exactly.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n);
  static SymmetricMatrix identity(std::size_t n, real scale = 1);
  /// Builds from a full row-major matrix; only the lower triangle is read.
  static SymmetricMatrix from_rows(const std::vector<std::vector<real>>& rows);

  std::size_t dim() const { return n_; }

  real operator()(std::size_t i, std::size_t j) const {
    return i >= j ? data_[index(i, j)] : data_[index(j, i)];
  }
  void set(std::size_t i, std::size_t j, real v) {
    if (i >= j) {
      data_[index(i, j)] = v;
    } else {
      data_[index(j, i)] = v;
    }
  }
  void add(std::size_t i, std::size_t j, real v) {
    if (i >= j) {
      data_[index(i, j)] += v;
    } else {
      data_[index(j, i)] += v;
    }
  }

  SymmetricMatrix& operator*=(real scale);
  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

  real max_abs() const;
  real max_diagonal() const;
  real frobenius_norm() const;
  bool all_finite() const;

  /// Packed lower triangle, row by row.
  std::span<const real> packed() const { return data_; }

 private:
  static std::size_t index(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

  std::size_t n_ = 0;
  std::vector<real> data_;
};

Vector sym_matvec(const SymmetricMatrix& a, const Vector& v);
/// vᵀ A v
real quad_form(const SymmetricMatrix& a, const Vector& v);

/// A + c·u uᵀ
SymmetricMatrix rank1_sym_update(SymmetricMatrix a, real c, const Vector& u);
void rank1_sym_update_inplace(SymmetricMatrix& a, real c, const Vector& u);
/// A += c·(u vᵀ + v uᵀ)
void rank2_sym_update_inplace(SymmetricMatrix& a, real c, const Vector& u, const Vector& v);

/// Lower-triangular Cholesky factor L with L Lᵀ = A.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(std::size_t n);

  std::size_t dim() const { return n_; }
  real operator()(std::size_t i, std::size_t j) const { return j > i ? real{0} : data_[i * (i + 1) / 2 + j]; }
  real& at(std::size_t i, std::size_t j) { return data_[i * (i + 1) / 2 + j]; }

  /// Solves A x = b using the factor.
  Vector solve(const Vector& b) const;
  /// L Lᵀ
  SymmetricMatrix reconstruct() const;

 private:
  std::size_t n_;
  std::vector<real> data_;
};

/// Cholesky factorization. Returns nullopt (not SPD) when a pivot falls to or
/// below 1e-14 times the largest diagonal entry of A.
std::optional<CholeskyFactor> spd_factor(const SymmetricMatrix& a);

std::string to_string(const Vector& v);

}  // namespace qnopt
