#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flashmp/cn_driver.hpp"
#include "flashmp/errors.hpp"
#include "flashmp/krylov.hpp"
#include "flashmp/partition.hpp"
#include "flashmp/subdomain_solver.hpp"
#include "flashmp/transport.hpp"

namespace flashmp {

/// Invalid experiment configuration (maps to exit status 64).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Mode { solve, cn, costs, sweep };

struct ExperimentConfig {
  Mode mode = Mode::solve;
  Box sub = Box::cube(16);
  ProcGrid grid{2, 2, 2};
  int overlap = 1;
  double alpha = 0.25;
  SolverConfig krylov;
  std::uint64_t seed = 42;
  int steps = 10;
  TransportKind transport = TransportKind::threads;
  std::optional<std::filesystem::path> out;
  bool trace = false;
  bool breakdown = false;
  std::vector<int> sweep_ranks{1, 2, 4, 8};

  [[nodiscard]] Box global() const { return {sub.nx * grid.px, sub.ny * grid.py, sub.nz * grid.pz}; }
  [[nodiscard]] double dt() const;
  /// Throws ConfigError.
  void validate() const;
};

struct RunSummary {
  ExperimentConfig config;
  SolveReport report;
  std::uint64_t global_dof = 0;
  double mdofs = 0.0;  // 3 * global volume / solve seconds / 1e6
  std::optional<double> efficiency;
};

/// MDoF/s for `dof` unknowns solved in `seconds`.
[[nodiscard]] double mdofs(std::uint64_t dof, double seconds);

/// b = A x0 with random x0 (seeded), then the configured Krylov solve from zero.
[[nodiscard]] RunSummary run_solve(const ExperimentConfig& config);

struct CnRun {
  ExperimentConfig config;
  std::vector<StepRecord> steps;
  double initial_max_abs = 0.0;
  std::optional<ConvergenceError> failure;
};
[[nodiscard]] CnRun run_cn_experiment(const ExperimentConfig& config);

/// Near-cubic factorization of `ranks`: prime factors, largest first, each
/// multiplied into the currently smallest axis (x first on ties).
[[nodiscard]] ProcGrid factor_ranks(int ranks);

/// efficiency(N) = rate(N) / ((N / N0) * rate(N0)) where N0 is the first entry.
[[nodiscard]] std::vector<double> weak_scaling_efficiency(const std::vector<std::pair<int, double>>& rank_rate);

[[nodiscard]] std::vector<RunSummary> run_scaling_sweep(const ExperimentConfig& base);

[[nodiscard]] CostModel run_costs(const ExperimentConfig& config);

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const RunSummary& summary);
void write_work_csv(std::ostream& os, const SolveReport& report);
void write_cn_csv(std::ostream& os, const CnRun& run);
void write_costs_csv(std::ostream& os, const CostModel& costs);

}  // namespace flashmp
