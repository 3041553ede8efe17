#include "flashmp/cn_driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flashmp/errors.hpp"
#include "flashmp/field_io.hpp"
#include "flashmp/operators.hpp"

namespace flashmp {
namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  return prefix.string() + suffix;
}

}  // namespace

EmState::EmState(FieldVector e, FieldVector h, int step, double time_step)
    : E(std::move(e)), H(std::move(h)), t(step), dt(time_step) {
  if (!(E.box() == H.box())) throw DimensionError("E and H boxes differ");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and non-negative");
}

double EmState::max_abs() const {
  double m = 0.0;
  for (double v : E.data()) m = std::max(m, std::abs(v));
  for (double v : H.data()) m = std::max(m, std::abs(v));
  return m;
}

FieldVector build_rhs(const EmState& state, bool with_boundary) {
  const Box& box = state.E.box();
  const double alpha = state.alpha();
  // A E = E + alpha K E, so (2I - A) E = E - alpha K E.
  FieldVector r = apply_A(OperatorParams(box, alpha), with_boundary, state.E);
  const FieldVector curl_h = apply_curl(DifferenceKind::backward, state.H);
  auto out = r.data();
  const auto e = state.E.data();
  const auto c = curl_h.data();
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = 2.0 * e[p] - out[p] + state.dt * c[p];
  return r;
}

DistributedSolver::DistributedSolver(Box global, double alpha, Options options)
    : alpha_(alpha),
      options_(options),
      layout_(make_partition(global, options.grid, 0)),
      transport_(make_transport(options.transport, options.grid.size())),
      ctx_(std::make_unique<DistributedContext>(layout_, *transport_)),
      op_(std::make_unique<DistributedOperator>(*ctx_, alpha, options.with_boundary)) {
  options_.krylov.validate();
  if (options_.krylov.preconditioner == PreconditionerKind::ras) {
    const Partition overlapped = make_partition(global, options.grid, options.overlap);
    prec_ = std::make_unique<RasPreconditioner>(*ctx_, overlapped, alpha, options.with_boundary, cache_);
  } else {
    prec_ = std::make_unique<IdentityPreconditioner>();
  }
}

SolveReport DistributedSolver::solve(const DistributedField& rhs, DistributedField& x) {
  return krylov_solve(*ctx_, *op_, *prec_, rhs, x, options_.krylov);
}

SolveReport DistributedSolver::solve(const FieldVector& rhs, FieldVector& x) {
  DistributedField dx = ctx_->zeros();
  auto report = solve(scatter(layout_, rhs), dx);
  x = gather(layout_, dx);
  return report;
}

EmState cn_step(const EmState& state, DistributedSolver& solver, SolveReport* report) {
  if (!(state.E.box() == solver.global_box())) throw DimensionError("state box does not match the solver");
  if (std::abs(state.alpha() - solver.alpha()) > 1e-15 * std::max(1.0, solver.alpha())) {
    throw std::invalid_argument("state dt does not match the solver alpha");
  }
  const FieldVector rhs = build_rhs(state, solver.options().with_boundary);
  EmState next;
  next.t = state.t + 1;
  next.dt = state.dt;
  const SolveReport r = solver.solve(rhs, next.E);
  if (report) *report = r;
  if (!r.converged()) {
    throw ConvergenceError(next.t, std::string(to_string(r.status)) + " after " + std::to_string(r.iterations) +
                                       " iterations " + r.message);
  }
  FieldVector sum = next.E;
  {
    auto s = sum.data();
    const auto e = state.E.data();
    for (std::size_t p = 0; p < s.size(); ++p) s[p] += e[p];
  }
  const FieldVector curl = apply_curl(DifferenceKind::forward, sum);
  next.H = state.H;
  auto h = next.H.data();
  const auto c = curl.data();
  for (std::size_t p = 0; p < h.size(); ++p) h[p] -= 0.5 * state.dt * c[p];
  if (!next.finite()) throw ConvergenceError(next.t, "non-finite field values");
  return next;
}

std::vector<StepRecord> run_cn(EmState& state, DistributedSolver& solver, int steps) {
  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  for (int s = 0; s < steps; ++s) {
    SolveReport report;
    state = cn_step(state, solver, &report);
    records.push_back({state.t, report.iterations, report.final_relres(), state.max_abs()});
  }
  return records;
}

void save_checkpoint(const std::filesystem::path& prefix, const EmState& state) {
  write_field(with_suffix(prefix, ".E.fmpf"), state.E);
  write_field(with_suffix(prefix, ".H.fmpf"), state.H);
  std::ofstream os(with_suffix(prefix, ".header"));
  if (!os) throw FormatError("cannot write checkpoint header");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", state.dt);
  os << "t=" << state.t << "\ndt=" << buf << "\n";
}

EmState load_checkpoint(const std::filesystem::path& prefix) {
  std::ifstream is(with_suffix(prefix, ".header"));
  if (!is) throw FormatError("cannot read checkpoint header");
  int t = -1;
  double dt = -1.0;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "t") t = std::stoi(value);
    if (key == "dt") dt = std::stod(value);
  }
  if (t < 0 || dt < 0.0) throw FormatError("checkpoint header lacks t or dt");
  return {read_field(with_suffix(prefix, ".E.fmpf")), read_field(with_suffix(prefix, ".H.fmpf")), t, dt};
}

}  // namespace flashmp
