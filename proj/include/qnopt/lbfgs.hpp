#pragma once

#include <cstddef>
#include <deque>

#include "qnopt/linalg.hpp"

namespace qnopt {

/// Initial matrix H0 used inside the two-loop recursion.
enum class LbfgsScaling {
  Gamma,    // H0 = (sᵀy / yᵀy) I from the newest pair
  Identity  // H0 = I, reproduces dense BFGS started from the identity
};

/// Bounded ring of correction pairs (s_i, y_i, rho_i = 1 / y_iᵀs_i), oldest first.
class LbfgsHistory {
 public:
  explicit LbfgsHistory(std::size_t memory);

  /// Stores the pair unless yᵀs <= 1e-14 ||y|| ||s||; drops the oldest pair
  /// once the memory is full. Returns whether the pair was stored.
  bool push(const Vector& s, const Vector& y);
  void clear() { pairs_.clear(); }

  std::size_t size() const { return pairs_.size(); }
  std::size_t memory() const { return memory_; }
  bool empty() const { return pairs_.empty(); }

  const Vector& s(std::size_t i) const { return pairs_[i].s; }
  const Vector& y(std::size_t i) const { return pairs_[i].y; }
  real rho(std::size_t i) const { return pairs_[i].rho; }

 private:
  struct Pair {
    Vector s;
    Vector y;
    real rho;
  };
  std::size_t memory_;
  std::deque<Pair> pairs_;
};

/// Two-loop recursion: returns p = -H g for the limited-memory inverse
/// Hessian described by the history. An empty history gives p = -g.
Vector lbfgs_direction(const LbfgsHistory& history, const Vector& g, LbfgsScaling scaling = LbfgsScaling::Gamma);

}  // namespace qnopt
