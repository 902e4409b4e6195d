// qnopt command-line front end: single runs, the Rosenbrock table and
// multi-optimizer comparisons, all writing CSV.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnopt/bench.hpp"
#include "qnopt/minimize.hpp"
#include "qnopt/neuralnet.hpp"
#include "qnopt/testfns.hpp"

namespace {

using namespace qnopt;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemOptions {
  std::string problem = "rosenbrock";
  std::size_t dim = 2;
  std::uint64_t seed = 7;
  std::vector<std::size_t> hidden;
  std::size_t n_colloc = 64;
  std::size_t n_points = 32;
  double fd_h = 0;
  double lambda_pde = 1;
  double lambda_bc = 100;
};

struct SolverOptions {
  std::string optimizer = "bfgs";
  std::string globalization = "wolfe";
  double gtol = 1e-6;
  std::string gnorm = "l2";
  double ftol = 0;
  double xtol = 0;
  std::size_t max_iters = 5000;
  std::size_t lbfgs_memory = 10;
  double lr = 1e-3;
  double lr_decay = 1;
  bool wall_time = false;
};

struct StartOptions {
  std::optional<double> x0_fill;
  std::string x0_list;
};

void add_problem_flags(CLI::App* cmd, ProblemOptions& p) {
  cmd->add_option("--problem", p.problem, "Objective")
      ->check(CLI::IsMember({"rosenbrock", "quadratic-xy", "regression", "poisson-pinnlite"}))
      ->capture_default_str();
  cmd->add_option("--dim", p.dim, "Rosenbrock dimension (>= 2)")->capture_default_str();
  cmd->add_option("--seed", p.seed, "Seed for network initialization")->capture_default_str();
  cmd->add_option("--hidden", p.hidden, "Hidden layer widths (default 16,16 for the PINN, 16 for regression)")
      ->delimiter(',');
  cmd->add_option("--n-colloc", p.n_colloc, "PINN interior collocation points")->capture_default_str();
  cmd->add_option("--n-points", p.n_points, "Regression sample points")->capture_default_str();
  cmd->add_option("--fd-h", p.fd_h, "PINN: finite-difference step for u'' (0 = exact)")->capture_default_str();
  cmd->add_option("--lambda-pde", p.lambda_pde, "PINN residual weight")->capture_default_str();
  cmd->add_option("--lambda-bc", p.lambda_bc, "PINN boundary weight")->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, SolverOptions& s, bool with_optimizer) {
  if (with_optimizer) {
    cmd->add_option("--optimizer", s.optimizer, "Method")
        ->check(CLI::IsMember({"gd", "adam", "bfgs", "ssbfgs", "ssbroyden", "lbfgs"}))
        ->capture_default_str();
  }
  cmd->add_option("--globalization", s.globalization, "Step control")
      ->check(CLI::IsMember({"wolfe", "backtracking", "trust-region"}))
      ->capture_default_str();
  cmd->add_option("--gtol", s.gtol, "Gradient-norm tolerance")->capture_default_str();
  cmd->add_option("--gnorm", s.gnorm, "Norm used by --gtol")->check(CLI::IsMember({"l2", "linf"}))->capture_default_str();
  cmd->add_option("--ftol", s.ftol, "Stop when |f_k - f_k-1| <= ftol (0 disables)")->capture_default_str();
  cmd->add_option("--xtol", s.xtol, "Stop when ||x_k - x_k-1|| <= xtol (0 disables)")->capture_default_str();
  cmd->add_option("--max-iters", s.max_iters, "Iteration cap")->capture_default_str();
  cmd->add_option("--lbfgs-memory", s.lbfgs_memory, "L-BFGS history length")->capture_default_str();
  cmd->add_option("--lr", s.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--lr-decay", s.lr_decay, "Adam: multiply the rate by this every 1000 steps")->capture_default_str();
  cmd->add_flag("--wall-time", s.wall_time, "Record elapsed seconds in traces (breaks byte-identical output)");
}

void add_start_flags(CLI::App* cmd, StartOptions& st) {
  auto* fill = cmd->add_option("--x0-fill", st.x0_fill, "Constant starting point");
  auto* list = cmd->add_option("--x0", st.x0_list, "Comma-separated starting point");
  fill->excludes(list);
}

MlpArchitecture architecture_for(const ProblemOptions& p, std::vector<std::size_t> default_hidden) {
  std::vector<std::size_t> sizes{1};
  for (std::size_t w : p.hidden.empty() ? default_hidden : p.hidden) sizes.push_back(w);
  sizes.push_back(1);
  MlpArchitecture arch{sizes};
  arch.validate();
  return arch;
}

std::unique_ptr<Problem> make_problem(const ProblemOptions& p) {
  if (p.problem == "rosenbrock") {
    if (p.dim < 2) throw UsageError("--dim must be at least 2 for rosenbrock");
    return std::make_unique<Rosenbrock>(p.dim);
  }
  if (p.problem == "quadratic-xy") return std::make_unique<QuadraticXY>();
  if (p.problem == "regression") {
    return std::make_unique<RegressionProblem>(architecture_for(p, {16}), p.n_points,
                                               [](real x) { return std::sin(2 * real(M_PI) * x); });
  }
  PoissonConfig cfg;
  cfg.arch = architecture_for(p, {16, 16});
  cfg.n_colloc = p.n_colloc;
  cfg.fd_h = p.fd_h;
  cfg.lambda_pde = p.lambda_pde;
  cfg.lambda_bc = p.lambda_bc;
  return std::make_unique<PoissonPinnLite>(cfg);
}

Vector parse_list(const std::string& text) {
  std::vector<real> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("--x0: cannot parse '" + item + "'");
    values.push_back(static_cast<real>(v));
  }
  if (values.empty()) throw UsageError("--x0 is empty");
  return Vector(std::move(values));
}

Vector starting_point(const ProblemOptions& p, const StartOptions& st, const Problem& problem) {
  Vector x0;
  if (st.x0_fill) {
    x0 = Vector(problem.dim(), static_cast<real>(*st.x0_fill));
  } else if (!st.x0_list.empty()) {
    x0 = parse_list(st.x0_list);
  } else if (p.problem == "rosenbrock") {
    x0 = Vector(problem.dim(), real(0.5));
  } else if (p.problem == "quadratic-xy") {
    x0 = Vector{1, 1};
  } else {
    const auto& net = p.problem == "regression" ? dynamic_cast<const RegressionProblem&>(problem).network()
                                                : dynamic_cast<const PoissonPinnLite&>(problem).network();
    x0 = init_glorot(net.architecture(), p.seed);
  }
  if (x0.size() != problem.dim()) {
    throw UsageError("starting point has " + std::to_string(x0.size()) + " entries, problem needs " +
                     std::to_string(problem.dim()));
  }
  return x0;
}

OptimizerConfig solver_config(const SolverOptions& s, const std::string& optimizer) {
  OptimizerConfig cfg;
  cfg.method = *parse_method(optimizer);
  cfg.globalization = *parse_globalization(s.globalization);
  cfg.criteria.gtol = static_cast<real>(s.gtol);
  cfg.criteria.gnorm = *parse_norm(s.gnorm);
  cfg.criteria.ftol = static_cast<real>(s.ftol);
  cfg.criteria.xtol = static_cast<real>(s.xtol);
  cfg.criteria.max_iters = s.max_iters;
  cfg.lbfgs_memory = s.lbfgs_memory;
  cfg.adam.lr = static_cast<real>(s.lr);
  cfg.adam.decay_factor = static_cast<real>(s.lr_decay);
  cfg.record_wall_time = s.wall_time;
  if (cfg.globalization == Globalization::TrustRegion && !is_dense_quasi_newton(cfg.method)) {
    throw UsageError("--globalization trust-region requires --optimizer bfgs, ssbfgs or ssbroyden");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  return out;
}

std::string summary_line(const Problem& problem, const OptimizerConfig& cfg, const RunResult& r) {
  std::ostringstream out;
  out << "problem=" << problem.name() << " dim=" << problem.dim() << " optimizer=" << to_string(cfg.method);
  if (cfg.method != Method::Adam) out << " globalization=" << to_string(cfg.globalization);
  out << " status=" << to_string(r.status) << " iterations=" << r.iterations << " f=" << format_real(r.f)
      << " gnorm_l2=" << format_real(r.trace.back().gnorm_l2) << " gnorm_inf=" << format_real(r.trace.back().gnorm_inf)
      << " n_fev=" << r.n_fev << " n_gev=" << r.n_gev;
  return out.str();
}

int cmd_run(const ProblemOptions& p, const SolverOptions& s, const StartOptions& st, const std::string& trace_path,
            const std::string& out_path) {
  auto problem = make_problem(p);
  const Vector x0 = starting_point(p, st, *problem);
  const OptimizerConfig cfg = solver_config(s, s.optimizer);
  const RunResult r = minimize(*problem, x0, cfg);
  if (!trace_path.empty()) {
    auto out = open_output(trace_path);
    write_trace_csv(out, r.trace);
  }
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    out << "i,x\n";
    for (std::size_t i = 0; i < r.x.size(); ++i) out << i << ',' << format_real(r.x[i]) << '\n';
  }
  std::cout << summary_line(*problem, cfg, r) << '\n';
  if (auto* pinn = dynamic_cast<PoissonPinnLite*>(problem.get())) {
    std::cout << "relative_l2_error=" << format_real(pinn->relative_l2_error(r.x)) << '\n';
  }
  if (!r.message.empty()) std::cout << "note: " << r.message << '\n';
  return kExitOk;
}

int cmd_table(const std::vector<std::size_t>& dims, const std::string& gnorm, double gtol, std::size_t max_iters,
              double adam_lr, const std::string& out_path) {
  TableOptions opts;
  opts.dims = dims;
  for (std::size_t d : dims) {
    if (d < 2) throw UsageError("--dims entries must be at least 2");
  }
  opts.gnorm = *parse_norm(gnorm);
  opts.gtol = static_cast<real>(gtol);
  opts.max_iters = max_iters;
  opts.adam_lr = static_cast<real>(adam_lr);
  const auto rows = table_rosenbrock(opts);
  std::cout << format_table(rows);
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    write_table_csv(out, rows);
  }
  return kExitOk;
}

int cmd_compare(const ProblemOptions& p, const SolverOptions& s, const StartOptions& st,
                const std::vector<std::string>& optimizers, const std::string& out_path) {
  const Vector x0 = starting_point(p, st, *make_problem(p));
  std::vector<CompareEntry> entries;
  for (const auto& name : optimizers) {
    if (!parse_method(name)) throw UsageError("unknown optimizer '" + name + "'");
    entries.push_back({name, solver_config(s, name)});
  }
  const auto runs = compare([&] { return make_problem(p); }, x0, entries);
  bool numerical_failure = false;
  for (const auto& run : runs) {
    if (!run.result) {
      std::cerr << run.label << ": numerical failure: " << run.error << '\n';
      numerical_failure = true;
      continue;
    }
    std::cerr << run.label << ": status=" << to_string(run.result->status) << " iterations=" << run.result->iterations
              << " f=" << format_real(run.result->f) << '\n';
  }
  if (out_path.empty()) {
    write_compare_csv(std::cout, runs);
  } else {
    auto out = open_output(out_path);
    write_compare_csv(out, runs);
  }
  return numerical_failure ? kExitNumerical : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnopt: quasi-Newton optimizers, benchmarks and traces"};
  app.require_subcommand(1);

  ProblemOptions run_problem;
  SolverOptions run_solver;
  StartOptions run_start;
  std::string trace_path;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run one optimizer on one problem");
  add_problem_flags(run, run_problem);
  add_solver_flags(run, run_solver, true);
  add_start_flags(run, run_start);
  run->add_option("--trace", trace_path, "Write the per-iteration trace CSV here");
  run->add_option("--out", run_out, "Write the final iterate (i,x CSV) here");

  std::vector<std::size_t> dims{2, 5, 10, 20};
  std::string table_gnorm = "linf";
  double table_gtol = 1e-6;
  std::size_t table_iters = 5000;
  double table_lr = 1e-2;
  std::string table_out;
  auto* table = app.add_subcommand("table", "Rosenbrock comparison table (gd, adam, bfgs, ssbfgs, ssbroyden)");
  table->add_option("--dims", dims, "Dimensions")->delimiter(',')->capture_default_str();
  table->add_option("--gnorm", table_gnorm, "Norm used by --gtol")->check(CLI::IsMember({"l2", "linf"}))->capture_default_str();
  table->add_option("--gtol", table_gtol, "Gradient-norm tolerance")->capture_default_str();
  table->add_option("--max-iters", table_iters, "Iteration cap")->capture_default_str();
  table->add_option("--adam-lr", table_lr, "Adam learning rate")->capture_default_str();
  table->add_option("--out", table_out, "Write the table as CSV here");

  ProblemOptions cmp_problem;
  SolverOptions cmp_solver;
  StartOptions cmp_start;
  std::vector<std::string> optimizers{"bfgs", "ssbroyden"};
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "Run several optimizers on one problem; long-format CSV");
  add_problem_flags(cmp, cmp_problem);
  add_solver_flags(cmp, cmp_solver, false);
  add_start_flags(cmp, cmp_start);
  cmp->add_option("--optimizers", optimizers, "Comma-separated optimizers")->delimiter(',')->capture_default_str();
  cmp->add_option("--out", cmp_out, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_problem, run_solver, run_start, trace_path, run_out);
    if (table->parsed()) return cmd_table(dims, table_gnorm, table_gtol, table_iters, table_lr, table_out);
    return cmd_compare(cmp_problem, cmp_solver, cmp_start, optimizers, cmp_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
