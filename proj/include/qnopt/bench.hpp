#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qnopt/minimize.hpp"

namespace qnopt {

/// Protocol of the Rosenbrock comparison table.
struct TableOptions {
  std::vector<std::size_t> dims{2, 5, 10, 20};
  std::vector<Method> methods{Method::GD, Method::Adam, Method::BFGS, Method::SSBFGS, Method::SSBroyden};
  real x0_fill = real(0.5);
  real gtol = real(1e-6);
  NormKind gnorm = NormKind::Linf;
  std::size_t max_iters = 5000;
  real adam_lr = real(1e-2);
};

/// Configuration used for one table row: gradient descent with
/// backtracking, Adam without globalization, quasi-Newton with strong Wolfe.
OptimizerConfig table_config(Method method, const TableOptions& opts);

struct BenchRow {
  std::size_t dim = 0;
  std::string label;  // optimizer+globalization
  std::size_t iterations = 0;
  real final_f = 0;
  Vector x;
  Status status = Status::MaxIters;
  /// Set when the run aborted; the remaining numeric fields are then unset.
  std::string error;
};

std::vector<BenchRow> table_rosenbrock(const TableOptions& opts = {});

/// Human-readable table aligned in columns.
std::string format_table(const std::vector<BenchRow>& rows);
/// dim,optimizer,iterations,final_f,x_first,x_last,status
void write_table_csv(std::ostream& out, const std::vector<BenchRow>& rows);

struct CompareEntry {
  std::string label;
  OptimizerConfig cfg;
};

struct CompareRun {
  std::string label;
  std::optional<RunResult> result;
  std::string error;
};

/// Runs every entry on a fresh problem from the same x0.
std::vector<CompareRun> compare(const std::function<std::unique_ptr<Problem>()>& make_problem, const Vector& x0,
                                const std::vector<CompareEntry>& entries);

/// Long format: optimizer,iter,f,gnorm_l2 with one line per trace row.
void write_compare_csv(std::ostream& out, const std::vector<CompareRun>& runs);

}  // namespace qnopt
