#include "flashmp/krylov.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

namespace flashmp {
namespace {

constexpr double kDivergence = 1e8;

template <typename... Args>
std::string printf_string(const char* fmt, Args... args) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}
constexpr double kReorthogonalize = 1e-8;

class Clock {
 public:
  explicit Clock(bool record) : record_(record), start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double ms() const {
    return record_ ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count()
                   : 0.0;
  }
  [[nodiscard]] bool recording() const { return record_; }
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool record_;
  std::chrono::steady_clock::time_point start_;
};

// Sets the context's count sink for the lifetime of the object.
class Sink {
 public:
  Sink(DistributedContext& ctx, WorkCounts& target) : ctx_(ctx) { ctx_.set_sink(&target); }
  ~Sink() { ctx_.set_sink(nullptr); }
  Sink(const Sink&) = delete;
  Sink& operator=(const Sink&) = delete;

 private:
  DistributedContext& ctx_;
};

void apply_op(DistributedContext& ctx, LinearOperator& op, const DistributedField& x, DistributedField& y) {
  op.apply(x, y);
  ctx.count_spmv();
}

void apply_prec(DistributedContext& ctx, Preconditioner& prec, const DistributedField& r, DistributedField& z) {
  prec.apply(r, z);
  ctx.count_precond();
}

// r = b - A x; returns ||r|| / bnorm.
double true_relres(DistributedContext& ctx, LinearOperator& op, const DistributedField& b,
                   const DistributedField& x, DistributedField& ax, DistributedField& r, double bnorm) {
  apply_op(ctx, op, x, ax);
  ctx.waxpy(r, -1.0, ax, b);
  return ctx.norm(r) / bnorm;
}

// With timing on, the solve time is the last trace timestamp so summaries can be
// recomputed from the trace.
void finish(DistributedContext& ctx, SolveReport& report, const Clock& clock) {
  report.breakdown = ctx.timers().all();
  report.solve_seconds = clock.recording() ? report.trace.back().time_ms / 1e3 : clock.seconds();
}

bool check_progress(SolveReport& report, double relres, const SolverConfig& config) {
  if (!std::isfinite(relres) || relres > kDivergence) {
    report.status = SolveStatus::diverged;
    report.message = printf_string("residual grew to %.3e at iteration %d", relres, report.iterations);
    return true;
  }
  if (relres <= config.tol) {
    report.status = SolveStatus::converged;
    return true;
  }
  return false;
}

void mark_breakdown(SolveReport& report, std::string_view what) {
  report.status = SolveStatus::breakdown;
  report.breakdown_iteration = report.iterations;
  report.message = std::string(what) + printf_string(" numerically zero at iteration %d", report.iterations);
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::bicgstab ? "bicgstab" : "gmres"; }

std::string_view to_string(PreconditionerKind p) { return p == PreconditionerKind::ras ? "ras" : "none"; }

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::breakdown: return "breakdown";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (restart < 1) throw std::invalid_argument("restart must be at least 1");
  if (max_iter < 0) throw std::invalid_argument("max_iter must be non-negative");
}

WorkCounts SolveReport::iteration_total() const {
  WorkCounts sum;
  for (const auto& w : work) sum += w;
  return sum;
}

WorkCounts SolveReport::total() const {
  WorkCounts sum = iteration_total();
  sum += setup;
  sum += monitor;
  return sum;
}

std::map<std::string, double> SolveReport::mean_work(int restart) const {
  std::size_t n = work.size();
  if (method == Method::gmres && restart > 0) {
    const std::size_t k = static_cast<std::size_t>(restart);
    if (n >= k) n -= n % k;
  }
  WorkCounts sum;
  for (std::size_t i = 0; i < n; ++i) sum += work[i];
  const double d = n == 0 ? 1.0 : static_cast<double>(n);
  return {{"precond", static_cast<double>(sum.precond) / d},
          {"spmv", static_cast<double>(sum.spmv) / d},
          {"dot", static_cast<double>(sum.dot) / d},
          {"axpy", static_cast<double>(sum.axpy) / d}};
}

SolveReport bicgstab(DistributedContext& ctx, LinearOperator& op, Preconditioner& prec,
                     const DistributedField& b, DistributedField& x, const SolverConfig& config) {
  config.validate();
  const Clock clock(config.record_time);
  SolveReport report;
  report.method = Method::bicgstab;

  x = ctx.zeros();
  auto r = ctx.zeros();
  auto r_tilde = ctx.zeros();
  auto p = ctx.zeros();
  auto v = ctx.zeros();
  auto s = ctx.zeros();
  auto t = ctx.zeros();
  auto ap = ctx.zeros();
  auto true_r = ctx.zeros();

  double bnorm = 0.0;
  double rho = 0.0;
  {
    Sink sink(ctx, report.setup);
    bnorm = ctx.norm(b);
    report.trace.push_back({0, 1.0, clock.ms()});
    if (bnorm == 0.0) {
      report.status = SolveStatus::converged;
      report.trace.back().relres = 0.0;
      finish(ctx, report, clock);
      return report;
    }
    apply_prec(ctx, prec, b, r);
    ctx.copy(r, r_tilde);
    ctx.copy(r, p);
    rho = ctx.dot(r_tilde, r);
  }
  const double rho0 = std::abs(rho);
  if (rho0 == 0.0) {
    mark_breakdown(report, "rho");
    finish(ctx, report, clock);
    return report;
  }

  while (report.iterations < config.max_iter) {
    ++report.iterations;
    report.work.emplace_back();
    {
      Sink sink(ctx, report.work.back());
      apply_op(ctx, op, p, ap);
      apply_prec(ctx, prec, ap, v);
      const double rv = ctx.dot(r_tilde, v);
      if (rv == 0.0 || !std::isfinite(rv)) {
        mark_breakdown(report, "r_tilde.v");
        break;
      }
      const double alpha = rho / rv;
      ctx.waxpy(s, -alpha, v, r);
      apply_op(ctx, op, s, ap);
      apply_prec(ctx, prec, ap, t);
      const double ts = ctx.dot(t, s);
      const double tt = ctx.dot(t, t);
      const double omega = tt == 0.0 ? 0.0 : ts / tt;
      ctx.axpy(alpha, p, x);
      ctx.axpy(omega, s, x);
      ctx.waxpy(r, -omega, t, s);
      const double rho_next = ctx.dot(r_tilde, r);
      if (std::abs(omega) < 1e-30 || std::abs(rho_next) < 1e-30 * rho0) {
        // x is already updated; this is a breakdown only if it has not converged.
        Sink monitor(ctx, report.monitor);
        const double relres = true_relres(ctx, op, b, x, ap, true_r, bnorm);
        report.trace.push_back({report.iterations, relres, clock.ms()});
        if (!check_progress(report, relres, config)) mark_breakdown(report, omega == 0.0 ? "omega" : "rho");
        finish(ctx, report, clock);
        return report;
      }
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      ctx.axpy(-omega, v, p);
      ctx.xpay(r, beta, p);
    }
    Sink monitor(ctx, report.monitor);
    const double relres = true_relres(ctx, op, b, x, ap, true_r, bnorm);
    report.trace.push_back({report.iterations, relres, clock.ms()});
    if (check_progress(report, relres, config)) break;
  }
  finish(ctx, report, clock);
  return report;
}

SolveReport gmres(DistributedContext& ctx, LinearOperator& op, Preconditioner& prec,
                  const DistributedField& b, DistributedField& x, const SolverConfig& config) {
  config.validate();
  const Clock clock(config.record_time);
  SolveReport report;
  report.method = Method::gmres;
  const int k = config.restart;

  x = ctx.zeros();
  auto x_cycle = ctx.zeros();
  auto w = ctx.zeros();
  auto aw = ctx.zeros();
  auto true_r = ctx.zeros();
  std::vector<DistributedField> basis(static_cast<std::size_t>(k) + 1);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k + 1, k);  // rotated into upper triangular form
  Eigen::VectorXd cs(k), sn(k), g(k + 1);

  double bnorm = 0.0;
  {
    Sink sink(ctx, report.setup);
    bnorm = ctx.norm(b);
  }
  report.trace.push_back({0, 1.0, clock.ms()});
  if (bnorm == 0.0) {
    report.status = SolveStatus::converged;
    report.trace.back().relres = 0.0;
    finish(ctx, report, clock);
    return report;
  }
  ctx.copy(b, true_r);

  const double eps = std::numeric_limits<double>::epsilon();
  bool done = false;
  while (!done && report.iterations < config.max_iter) {
    double beta = 0.0;
    {
      Sink sink(ctx, report.setup);
      basis[0] = ctx.zeros();
      apply_prec(ctx, prec, true_r, basis[0]);
      beta = ctx.norm(basis[0]);
    }
    if (beta == 0.0 || !std::isfinite(beta)) {
      mark_breakdown(report, "preconditioned residual");
      break;
    }
    ctx.scale(1.0 / beta, basis[0]);
    h.setZero();
    g.setZero();
    g(0) = beta;
    ctx.copy(x, x_cycle);

    for (int j = 0; j < k && report.iterations < config.max_iter; ++j) {
      ++report.iterations;
      report.work.emplace_back();
      bool happy = false;
      {
        Sink sink(ctx, report.work.back());
        apply_op(ctx, op, basis[j], aw);
        apply_prec(ctx, prec, aw, w);
        double projected = 0.0;
        for (int i = 0; i <= j; ++i) {
          const double hij = ctx.dot(w, basis[i]);
          h(i, j) = hij;
          projected += hij * hij;
          ctx.axpy(-hij, basis[i], w);
        }
        double hnext = ctx.norm(w);
        const double before = std::sqrt(projected + hnext * hnext);
        if (hnext > 0.0 && eps * before / hnext > kReorthogonalize) {
          ++report.reorthogonalizations;
          for (int i = 0; i <= j; ++i) {
            const double c = ctx.dot(w, basis[i]);
            h(i, j) += c;
            ctx.axpy(-c, basis[i], w);
          }
          hnext = ctx.norm(w);
        }
        h(j + 1, j) = hnext;
        happy = hnext <= eps * before;
        if (!happy) {
          basis[j + 1] = ctx.zeros();
          ctx.copy(w, basis[j + 1]);
          ctx.scale(1.0 / hnext, basis[j + 1]);
        }
      }

      // Givens rotations on the new column.
      for (int i = 0; i < j; ++i) {
        const double a = h(i, j);
        const double c = h(i + 1, j);
        h(i, j) = cs(i) * a + sn(i) * c;
        h(i + 1, j) = -sn(i) * a + cs(i) * c;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      if (denom == 0.0 || !std::isfinite(denom)) {
        mark_breakdown(report, "Arnoldi column");
        done = true;
        break;
      }
      cs(j) = h(j, j) / denom;
      sn(j) = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      const Eigen::VectorXd y =
          h.topLeftCorner(j + 1, j + 1).triangularView<Eigen::Upper>().solve(g.head(j + 1));

      Sink monitor(ctx, report.monitor);
      ctx.copy(x_cycle, x);
      for (int i = 0; i <= j; ++i) ctx.axpy(y(i), basis[i], x);
      const double relres = true_relres(ctx, op, b, x, aw, true_r, bnorm);
      report.trace.push_back({report.iterations, relres, clock.ms()});
      if (check_progress(report, relres, config)) {
        done = true;
        break;
      }
      if (happy) break;  // Krylov space exhausted; restart from the current iterate
    }
  }
  finish(ctx, report, clock);
  return report;
}

SolveReport krylov_solve(DistributedContext& ctx, LinearOperator& op, Preconditioner& prec,
                         const DistributedField& b, DistributedField& x, const SolverConfig& config) {
  return config.method == Method::bicgstab ? bicgstab(ctx, op, prec, b, x, config)
                                           : gmres(ctx, op, prec, b, x, config);
}

void write_trace_csv(std::ostream& os, const SolveReport& report) {
  os << "iter,relres,time_ms\n";
  for (const auto& p : report.trace) os << printf_string("%d,%.17e,%.6f\n", p.iteration, p.relres, p.time_ms);
}

void write_breakdown_csv(std::ostream& os, const SolveReport& report) {
  os << "category,seconds\n";
  for (auto c : kBreakdownCategories) {
    auto it = report.breakdown.find(c);
    os << c << printf_string(",%.9f\n", it == report.breakdown.end() ? 0.0 : it->second);
  }
}

}  // namespace flashmp
