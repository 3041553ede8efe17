#include "flashmp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "flashmp/random.hpp"

namespace flashmp {
namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string_view to_string(TransportKind k) { return k == TransportKind::serial ? "serial" : "threads"; }

DistributedSolver::Options solver_options(const ExperimentConfig& c) {
  DistributedSolver::Options o;
  o.grid = c.grid;
  o.overlap = c.overlap;
  o.krylov = c.krylov;
  o.transport = c.transport;
  o.with_boundary = true;
  return o;
}

}  // namespace

double ExperimentConfig::dt() const { return 2.0 * std::sqrt(alpha); }

void ExperimentConfig::validate() const {
  if (grid.px < 1 || grid.py < 1 || grid.pz < 1) throw ConfigError("process grid entries must be positive");
  if (overlap < 0) throw ConfigError("overlap must be non-negative");
  if (overlap > std::min({sub.nx, sub.ny, sub.nz}) && grid.size() > 1) {
    throw ConfigError("overlap exceeds the subdomain extent");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and non-negative");
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (mode == Mode::costs && !sub.is_cube()) throw ConfigError("costs mode needs a cubic subdomain");
  if (mode == Mode::sweep && sweep_ranks.empty()) throw ConfigError("sweep needs at least one rank count");
  for (int r : sweep_ranks)
    if (r < 1) throw ConfigError("sweep rank counts must be positive");
  try {
    krylov.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

double mdofs(std::uint64_t dof, double seconds) {
  return seconds > 0.0 ? static_cast<double>(dof) / seconds / 1e6 : 0.0;
}

RunSummary run_solve(const ExperimentConfig& config) {
  config.validate();
  const Box global = config.global();
  DistributedSolver solver(global, config.alpha, solver_options(config));
  auto& ctx = solver.context();
  auto b = ctx.zeros();
  solver.op().apply(scatter(solver.layout(), random_field(global, config.seed)), b);
  ctx.timers().reset();

  RunSummary s;
  s.config = config;
  auto x = ctx.zeros();
  s.report = solver.solve(b, x);
  s.global_dof = global.dof();
  s.mdofs = mdofs(s.global_dof, s.report.solve_seconds);
  return s;
}

CnRun run_cn_experiment(const ExperimentConfig& config) {
  config.validate();
  const Box global = config.global();
  DistributedSolver solver(global, config.alpha, solver_options(config));
  EmState state(random_field(global, config.seed), random_field(global, config.seed + 1), 0, config.dt());
  CnRun run;
  run.config = config;
  run.initial_max_abs = state.max_abs();
  for (int i = 0; i < config.steps; ++i) {
    SolveReport report;
    try {
      state = cn_step(state, solver, &report);
    } catch (const ConvergenceError& e) {
      run.failure = e;
      break;
    }
    run.steps.push_back({state.t, report.iterations, report.final_relres(), state.max_abs()});
  }
  return run;
}

ProcGrid factor_ranks(int ranks) {
  if (ranks < 1) throw ConfigError("rank count must be positive");
  std::vector<int> primes;
  int n = ranks;
  for (int p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  if (n > 1) primes.push_back(n);
  std::sort(primes.rbegin(), primes.rend());
  std::array<int, 3> g{1, 1, 1};
  for (int p : primes) {
    auto smallest = std::min_element(g.begin(), g.end());
    *smallest *= p;
  }
  return {g[0], g[1], g[2]};
}

std::vector<double> weak_scaling_efficiency(const std::vector<std::pair<int, double>>& rank_rate) {
  std::vector<double> eff;
  if (rank_rate.empty()) return eff;
  const auto [n0, r0] = rank_rate.front();
  for (const auto& [n, r] : rank_rate) {
    const double ideal = static_cast<double>(n) / static_cast<double>(n0) * r0;
    eff.push_back(ideal > 0.0 ? r / ideal : 0.0);
  }
  return eff;
}

std::vector<RunSummary> run_scaling_sweep(const ExperimentConfig& base) {
  base.validate();
  std::vector<RunSummary> rows;
  std::vector<std::pair<int, double>> rates;
  for (int ranks : base.sweep_ranks) {
    ExperimentConfig c = base;
    c.mode = Mode::solve;
    c.grid = factor_ranks(ranks);
    rows.push_back(run_solve(c));
    rates.emplace_back(ranks, rows.back().mdofs);
  }
  const auto eff = weak_scaling_efficiency(rates);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].efficiency = eff[i];
  return rows;
}

CostModel run_costs(const ExperimentConfig& config) {
  config.validate();
  if (!config.sub.is_cube()) throw ConfigError("costs mode needs a cubic subdomain");
  return cost_model(config.sub);
}

void write_summary_header(std::ostream& os) {
  os << "# mdofs = 3 * global_volume / solve_seconds / 1e6\n"
        "method,preconditioner,sub_nx,sub_ny,sub_nz,px,py,pz,ranks,overlap,alpha,tol,restart,seed,transport,"
        "status,iterations,final_relres,solve_seconds,global_dof,mdofs,efficiency,"
        "precond_per_iter,spmv_per_iter,dot_per_iter,axpy_per_iter\n";
}

void write_summary_row(std::ostream& os, const RunSummary& s) {
  const auto& c = s.config;
  const auto mean = s.report.mean_work(c.krylov.restart);
  os << to_string(c.krylov.method) << ',' << to_string(c.krylov.preconditioner) << ',' << c.sub.nx << ','
     << c.sub.ny << ',' << c.sub.nz << ',' << c.grid.px << ',' << c.grid.py << ',' << c.grid.pz << ','
     << c.grid.size() << ',' << c.overlap << ',' << fmt("%.17g", c.alpha) << ',' << fmt("%.3g", c.krylov.tol)
     << ',' << c.krylov.restart << ',' << c.seed << ',' << to_string(c.transport) << ','
     << to_string(s.report.status) << ',' << s.report.iterations << ',' << fmt("%.17e", s.report.final_relres())
     << ',' << fmt("%.9f", s.report.solve_seconds) << ',' << s.global_dof << ',' << fmt("%.6f", s.mdofs) << ','
     << (s.efficiency ? fmt("%.6f", *s.efficiency) : std::string()) << ',' << fmt("%.4f", mean.at("precond"))
     << ',' << fmt("%.4f", mean.at("spmv")) << ',' << fmt("%.4f", mean.at("dot")) << ','
     << fmt("%.4f", mean.at("axpy")) << '\n';
}

void write_work_csv(std::ostream& os, const SolveReport& report) {
  os << "iter,precond,spmv,dot,axpy\n";
  for (std::size_t i = 0; i < report.work.size(); ++i) {
    const auto& w = report.work[i];
    os << i + 1 << ',' << w.precond << ',' << w.spmv << ',' << w.dot << ',' << w.axpy << '\n';
  }
}

void write_cn_csv(std::ostream& os, const CnRun& run) {
  os << "step,iterations,relres,max_abs\n";
  for (const auto& r : run.steps) {
    os << r.t << ',' << r.iterations << ',' << fmt("%.17e", r.relres) << ',' << fmt("%.17e", r.max_abs) << '\n';
  }
}

void write_costs_csv(std::ostream& os, const CostModel& c) {
  os << "quantity,value\n"
     << "n," << c.box.nx << '\n'
     << "correction_size," << c.correction_size << '\n'
     << "flashmp_flops," << c.table_flops << '\n'
     << "flashmp_flops_per_solve," << c.flops_per_solve << '\n'
     << "flashmp_bytes," << c.bytes_resident << '\n'
     << "direct_flops," << c.direct_flops << '\n'
     << "direct_bytes_inverse," << c.direct_bytes_inverse << '\n'
     << "direct_bytes_vectors," << c.direct_bytes_vectors << '\n';
}

}  // namespace flashmp
