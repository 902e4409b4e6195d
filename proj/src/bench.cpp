#include "qnopt/bench.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace qnopt {

OptimizerConfig table_config(Method method, const TableOptions& opts) {
  OptimizerConfig cfg;
  cfg.method = method;
  cfg.criteria.gtol = opts.gtol;
  cfg.criteria.gnorm = opts.gnorm;
  cfg.criteria.max_iters = opts.max_iters;
  cfg.adam.lr = opts.adam_lr;
  cfg.globalization = method == Method::GD ? Globalization::Backtracking : Globalization::Wolfe;
  return cfg;
}

namespace {

std::string row_label(Method m) {
  switch (m) {
    case Method::GD: return "gd+backtracking";
    case Method::Adam: return "adam";
    default: return std::string(to_string(m)) + "+wolfe";
  }
}

}  // namespace

std::vector<BenchRow> table_rosenbrock(const TableOptions& opts) {
  std::vector<BenchRow> rows;
  for (std::size_t dim : opts.dims) {
    for (Method m : opts.methods) {
      BenchRow row;
      row.dim = dim;
      row.label = row_label(m);
      try {
        Rosenbrock problem(dim);
        RunResult r = minimize(problem, Vector(dim, opts.x0_fill), table_config(m, opts));
        row.iterations = r.iterations;
        row.final_f = r.f;
        row.x = r.x;
        row.status = r.status;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%4s  %-18s %6s  %-12s %-10s %-10s  %s\n", "dim", "optimizer", "iters", "final_f",
                "x_first", "x_last", "status");
  out << buf;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%4zu  %-18s FAILED: ", r.dim, r.label.c_str());
      out << buf << r.error << '\n';
      continue;
    }
    std::snprintf(buf, sizeof buf, "%4zu  %-18s %6zu  %-12.3e %-10.6f %-10.6f  %s\n", r.dim, r.label.c_str(),
                  r.iterations, static_cast<double>(r.final_f), static_cast<double>(r.x[0]),
                  static_cast<double>(r.x[r.x.size() - 1]), to_string(r.status));
    out << buf;
  }
  return out.str();
}

void write_table_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "dim,optimizer,iterations,final_f,x_first,x_last,status\n";
  for (const auto& r : rows) {
    out << r.dim << ',' << r.label << ',';
    if (!r.error.empty()) {
      out << ",,,,failed\n";
      continue;
    }
    out << r.iterations << ',' << format_real(r.final_f) << ',' << format_real(r.x[0]) << ','
        << format_real(r.x[r.x.size() - 1]) << ',' << to_string(r.status) << '\n';
  }
}

std::vector<CompareRun> compare(const std::function<std::unique_ptr<Problem>()>& make_problem, const Vector& x0,
                                const std::vector<CompareEntry>& entries) {
  std::vector<CompareRun> runs;
  for (const auto& entry : entries) {
    CompareRun run;
    run.label = entry.label;
    try {
      auto problem = make_problem();
      run.result = minimize(*problem, x0, entry.cfg);
    } catch (const NumericalError& e) {
      run.error = e.what();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRun>& runs) {
  out << "optimizer,iter,f,gnorm_l2\n";
  for (const auto& run : runs) {
    if (!run.result) continue;
    for (const auto& r : run.result->trace) {
      out << run.label << ',' << r.iter << ',' << format_real(r.f) << ',' << format_real(r.gnorm_l2) << '\n';
    }
  }
}

}  // namespace qnopt
