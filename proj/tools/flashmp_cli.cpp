#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "flashmp/errors.hpp"
#include "flashmp/experiment.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitConfig = 64;

constexpr const char* kSchemas = R"(Outputs (CSV, header row always written):
  summary.csv    method,preconditioner,sub_nx,sub_ny,sub_nz,px,py,pz,ranks,overlap,alpha,tol,
                 restart,seed,transport,status,iterations,final_relres,solve_seconds,global_dof,
                 mdofs,efficiency,precond_per_iter,spmv_per_iter,dot_per_iter,axpy_per_iter
                 (preceded by a '#' line defining mdofs = 3*global_volume/solve_seconds/1e6)
  trace.csv      iter,relres,time_ms          (--trace; relres is the true residual)
  breakdown.csv  category,seconds             (--breakdown; reorder, asm_comm, fast_solve,
                                               spmv, p2p, reduction, axpy_dot)
  work.csv       iter,precond,spmv,dot,axpy   (--breakdown)
  cn.csv         step,iterations,relres,max_abs        (cn mode)
  costs.csv      quantity,value                        (costs mode)
  sweep.csv      summary columns, one row per rank count (sweep mode)
Without --out, CSVs go to stdout.
Exit status: 0 converged, 2 not converged, 64 configuration error.)";

flashmp::Box parse_box(const std::vector<int>& v) {
  if (v.size() != 3) throw flashmp::ConfigError("--sub needs NX,NY,NZ");
  try {
    return {v[0], v[1], v[2]};
  } catch (const flashmp::DimensionError& e) {
    throw flashmp::ConfigError(e.what());
  }
}

flashmp::ProcGrid parse_grid(const std::vector<int>& v) {
  if (v.size() != 3) throw flashmp::ConfigError("--grid needs PX,PY,PZ");
  return {v[0], v[1], v[2]};
}

// Writes to <out>/<name> when an output directory is set, else to stdout.
template <typename Fn>
void emit(const std::optional<std::filesystem::path>& out, const std::string& name, Fn&& body) {
  if (!out) {
    body(std::cout);
    return;
  }
  std::filesystem::create_directories(*out);
  std::ofstream os(*out / name);
  if (!os) throw std::runtime_error("cannot write " + (*out / name).string());
  body(os);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace flashmp;
  CLI::App app{"FlashMP: CN-FDTD linear solves with a fast-diagonalization RAS preconditioner"};
  app.footer(kSchemas);
  app.set_config("--config", "", "key=value file mirroring the flags; flags override it");

  ExperimentConfig cfg;
  std::string mode = "solve", method = "gmres", transport = "threads", precond = "ras", clock = "wall";
  std::vector<int> sub{16, 16, 16}, grid{2, 2, 2};
  std::string out;
  double dt = -1.0;

  app.add_option("--mode", mode, "solve | cn | costs | sweep")
      ->check(CLI::IsMember({"solve", "cn", "costs", "sweep"}))
      ->capture_default_str();
  app.add_option("--sub", sub, "subdomain extents NX,NY,NZ")->delimiter(',')->expected(3)->capture_default_str();
  app.add_option("--grid", grid, "process grid PX,PY,PZ")->delimiter(',')->expected(3)->capture_default_str();
  app.add_option("--overlap", cfg.overlap, "overlap width in cells")->capture_default_str();
  auto* alpha_opt = app.add_option("--alpha", cfg.alpha, "alpha = dt^2/4")->capture_default_str();
  app.add_option("--dt", dt, "time step; sets alpha = dt^2/4")->excludes(alpha_opt);
  app.add_option("--method", method, "bicgstab | gmres")
      ->check(CLI::IsMember({"bicgstab", "gmres"}))
      ->capture_default_str();
  app.add_option("--precond", precond, "ras | none")->check(CLI::IsMember({"ras", "none"}))->capture_default_str();
  app.add_option("--restart", cfg.krylov.restart, "GMRES restart length")->capture_default_str();
  app.add_option("--tol", cfg.krylov.tol, "relative residual tolerance")->capture_default_str();
  app.add_option("--max-iter", cfg.krylov.max_iter, "iteration limit")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--steps", cfg.steps, "CN steps (cn mode)")->capture_default_str();
  app.add_option("--ranks", cfg.sweep_ranks, "rank counts for sweep mode")->delimiter(',')->capture_default_str();
  app.add_option("--out", out, "output directory");
  app.add_flag("--trace", cfg.trace, "write the convergence trace");
  app.add_flag("--breakdown", cfg.breakdown, "write the timing breakdown and per-iteration work");
  app.add_option("--transport", transport, "threads | serial")
      ->check(CLI::IsMember({"threads", "serial"}))
      ->capture_default_str();
  app.add_option("--trace-clock", clock, "wall | none (none writes 0 in time_ms)")
      ->check(CLI::IsMember({"wall", "none"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    cfg.mode = mode == "cn" ? Mode::cn : mode == "costs" ? Mode::costs : mode == "sweep" ? Mode::sweep : Mode::solve;
    cfg.sub = parse_box(sub);
    cfg.grid = parse_grid(grid);
    if (dt >= 0.0) cfg.alpha = dt * dt / 4.0;
    cfg.krylov.method = method == "bicgstab" ? Method::bicgstab : Method::gmres;
    cfg.krylov.preconditioner = precond == "none" ? PreconditionerKind::none : PreconditionerKind::ras;
    cfg.krylov.record_time = clock == "wall";
    cfg.transport = transport == "serial" ? TransportKind::serial : TransportKind::threads;
    if (!out.empty()) cfg.out = out;
    cfg.validate();

    switch (cfg.mode) {
      case Mode::costs: {
        const auto costs = run_costs(cfg);
        emit(cfg.out, "costs.csv", [&](std::ostream& os) { write_costs_csv(os, costs); });
        return kExitConverged;
      }
      case Mode::cn: {
        const auto run = run_cn_experiment(cfg);
        emit(cfg.out, "cn.csv", [&](std::ostream& os) { write_cn_csv(os, run); });
        if (run.failure) {
          std::cerr << "flashmp: " << run.failure->what() << '\n';
          return kExitNotConverged;
        }
        return kExitConverged;
      }
      case Mode::sweep: {
        const auto rows = run_scaling_sweep(cfg);
        bool all = true;
        emit(cfg.out, "sweep.csv", [&](std::ostream& os) {
          write_summary_header(os);
          for (const auto& r : rows) {
            write_summary_row(os, r);
            all = all && r.report.converged();
          }
        });
        return all ? kExitConverged : kExitNotConverged;
      }
      case Mode::solve: {
        const auto s = run_solve(cfg);
        emit(cfg.out, "summary.csv", [&](std::ostream& os) {
          write_summary_header(os);
          write_summary_row(os, s);
        });
        if (cfg.trace) emit(cfg.out, "trace.csv", [&](std::ostream& os) { write_trace_csv(os, s.report); });
        if (cfg.breakdown) {
          emit(cfg.out, "breakdown.csv", [&](std::ostream& os) { write_breakdown_csv(os, s.report); });
          emit(cfg.out, "work.csv", [&](std::ostream& os) { write_work_csv(os, s.report); });
        }
        if (!s.report.converged() && !s.report.message.empty()) std::cerr << "flashmp: " << s.report.message << '\n';
        return s.report.converged() ? kExitConverged : kExitNotConverged;
      }
    }
  } catch (const std::invalid_argument& e) {  // ConfigError, SizingError, DimensionError
    std::cerr << "flashmp: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateConfigurationError& e) {
    std::cerr << "flashmp: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "flashmp: " << e.what() << '\n';
    return 1;
  }
  return kExitConverged;
}
