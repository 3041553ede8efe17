#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "flashmp/distributed.hpp"
#include "flashmp/grid.hpp"
#include "flashmp/krylov.hpp"
#include "flashmp/partition.hpp"
#include "flashmp/ras.hpp"
#include "flashmp/transport.hpp"

namespace flashmp {

struct EmState {
  FieldVector E;
  FieldVector H;
  int t = 0;
  double dt = 1.0;

  EmState() = default;
  EmState(FieldVector e, FieldVector h, int step, double time_step);

  [[nodiscard]] double alpha() const { return dt * dt / 4.0; }
  [[nodiscard]] bool finite() const { return E.all_finite() && H.all_finite(); }
  [[nodiscard]] double max_abs() const;
};

/// R = E + dt C_b H - alpha (M (+ Lambda)) E. `with_boundary` must match the
/// implicit operator so the two halves of the scheme use the same K.
[[nodiscard]] FieldVector build_rhs(const EmState& state, bool with_boundary = true);

/// Global system I + alpha M (+ alpha Lambda) solved by a preconditioned Krylov
/// method over a partitioned grid.
class DistributedSolver {
 public:
  struct Options {
    ProcGrid grid{1, 1, 1};
    int overlap = 1;
    SolverConfig krylov;
    TransportKind transport = TransportKind::threads;
    bool with_boundary = true;
  };

  DistributedSolver(Box global, double alpha, Options options);

  SolveReport solve(const FieldVector& rhs, FieldVector& x);
  SolveReport solve(const DistributedField& rhs, DistributedField& x);

  [[nodiscard]] const Box& global_box() const { return layout_.global_box(); }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const Options& options() const { return options_; }
  [[nodiscard]] const Partition& layout() const { return layout_; }
  [[nodiscard]] DistributedContext& context() { return *ctx_; }
  [[nodiscard]] DistributedOperator& op() { return *op_; }
  [[nodiscard]] Transport& transport() { return *transport_; }

 private:
  double alpha_;
  Options options_;
  Partition layout_;
  std::unique_ptr<Transport> transport_;
  std::unique_ptr<DistributedContext> ctx_;
  std::unique_ptr<DistributedOperator> op_;
  SolverCache cache_;
  std::unique_ptr<Preconditioner> prec_;
};

/// One CN step: solve A E' = R, then H' = H - dt/2 C_f (E' + E).
/// Throws ConvergenceError (carrying the step index) if the solve fails.
[[nodiscard]] EmState cn_step(const EmState& state, DistributedSolver& solver, SolveReport* report = nullptr);

struct StepRecord {
  int t = 0;
  int iterations = 0;
  double relres = 0.0;
  double max_abs = 0.0;
};

/// Advances `state` by `steps` steps, checking finiteness after each one.
std::vector<StepRecord> run_cn(EmState& state, DistributedSolver& solver, int steps);

/// Writes <prefix>.E.fmpf, <prefix>.H.fmpf and <prefix>.header (t and dt).
void save_checkpoint(const std::filesystem::path& prefix, const EmState& state);
[[nodiscard]] EmState load_checkpoint(const std::filesystem::path& prefix);

}  // namespace flashmp
