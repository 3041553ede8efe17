#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "flashmp/distributed.hpp"

namespace flashmp {

enum class Method { bicgstab, gmres };
enum class PreconditionerKind { none, ras };

[[nodiscard]] std::string_view to_string(Method m);
[[nodiscard]] std::string_view to_string(PreconditionerKind p);

struct SolverConfig {
  Method method = Method::gmres;
  int restart = 30;  // gmres only
  double tol = 1e-12;
  int max_iter = 1000;
  PreconditionerKind preconditioner = PreconditionerKind::ras;
  bool record_time = true;  // false writes 0 into the trace time column

  /// Throws std::invalid_argument on tol <= 0, restart < 1 or max_iter < 0.
  void validate() const;
};

enum class SolveStatus { converged, max_iterations, breakdown, diverged };
[[nodiscard]] std::string_view to_string(SolveStatus s);

struct TracePoint {
  int iteration = 0;
  double relres = 0.0;  // true ||b - A x_k|| / ||b - A x_0||
  double time_ms = 0.0;
};

struct SolveReport {
  Method method = Method::gmres;
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  int breakdown_iteration = -1;
  std::string message;
  std::vector<TracePoint> trace;  // starts at iteration 0 with relres 1
  std::map<std::string, double, std::less<>> breakdown;
  std::vector<WorkCounts> work;  // work[i] belongs to iteration i + 1
  WorkCounts setup;              // initial norm, restarts
  WorkCounts monitor;            // true-residual evaluation each iteration
  int reorthogonalizations = 0;
  double solve_seconds = 0.0;

  [[nodiscard]] bool converged() const { return status == SolveStatus::converged; }
  [[nodiscard]] double final_relres() const { return trace.empty() ? 1.0 : trace.back().relres; }
  [[nodiscard]] WorkCounts iteration_total() const;
  [[nodiscard]] WorkCounts total() const;
  /// Means over the iterations of complete restart cycles (all iterations for bicgstab).
  [[nodiscard]] std::map<std::string, double> mean_work(int restart) const;
};

/// Left-preconditioned BiCGSTAB from x0 = 0. `x` is overwritten.
SolveReport bicgstab(DistributedContext& ctx, LinearOperator& op, Preconditioner& prec,
                     const DistributedField& b, DistributedField& x, const SolverConfig& config);

/// Left-preconditioned GMRES(k) with modified Gram-Schmidt from x0 = 0.
SolveReport gmres(DistributedContext& ctx, LinearOperator& op, Preconditioner& prec,
                  const DistributedField& b, DistributedField& x, const SolverConfig& config);

SolveReport krylov_solve(DistributedContext& ctx, LinearOperator& op, Preconditioner& prec,
                         const DistributedField& b, DistributedField& x, const SolverConfig& config);

/// `iter,relres,time_ms`
void write_trace_csv(std::ostream& os, const SolveReport& report);
/// `category,seconds`
void write_breakdown_csv(std::ostream& os, const SolveReport& report);

}  // namespace flashmp
