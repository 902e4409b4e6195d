#include "qnopt/lbfgs.hpp"

#include <stdexcept>
#include <vector>

#include "qnopt/updates.hpp"

namespace qnopt {

LbfgsHistory::LbfgsHistory(std::size_t memory) : memory_(memory) {
  if (memory == 0) throw std::invalid_argument("L-BFGS memory must be at least 1");
}

bool LbfgsHistory::push(const Vector& s, const Vector& y) {
  if (s.size() != y.size()) throw DimensionError("L-BFGS pair: s and y sizes differ");
  if (!pairs_.empty() && pairs_.front().s.size() != s.size()) {
    throw DimensionError("L-BFGS pair: dimension differs from stored pairs");
  }
  if (curvature_too_small(s, y)) return false;
  if (pairs_.size() == memory_) pairs_.pop_front();
  pairs_.push_back({s, y, 1 / dot(y, s)});
  return true;
}

Vector lbfgs_direction(const LbfgsHistory& history, const Vector& g, LbfgsScaling scaling) {
  Vector q = g;
  const std::size_t k = history.size();
  if (k > 0 && history.s(0).size() != g.size()) throw DimensionError("L-BFGS direction: gradient size mismatch");
  std::vector<real> alpha(k);
  for (std::size_t j = k; j-- > 0;) {
    alpha[j] = history.rho(j) * dot(history.s(j), q);
    axpy(-alpha[j], history.y(j), q);
  }
  if (k > 0 && scaling == LbfgsScaling::Gamma) {
    const Vector& s = history.s(k - 1);
    const Vector& y = history.y(k - 1);
    q *= dot(s, y) / dot(y, y);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const real beta = history.rho(j) * dot(history.y(j), q);
    axpy(alpha[j] - beta, history.s(j), q);
  }
  q *= real(-1);
  return q;
}

}  // namespace qnopt
